//! Parse a messy script and print its canonical form.

use policy_lab::dsl::{format_program, parse_source};

const MESSY: &str = "# tidy me\nvar   x=(1+2)*3 ;if x>2{out.china.eolRecyclingMT=out.china.eolRecyclingMT+x;}else{ limit out.china.eolMismanagedMT to [0,10]; }\n";

fn main() {
    let program = parse_source(MESSY, "messy.pol").expect("script parses");
    let canonical = format_program(&program);
    print!("{canonical}");
    let again = format_program(&parse_source(&canonical, "canonical.pol").expect("canonical form parses"));
    assert_eq!(again, canonical, "formatting is idempotent");

    match parse_source("change out.china.eolMismanagedMT by;", "broken.pol") {
        Ok(_) => unreachable!(),
        Err(e) => println!("broken.pol:{e}"),
    }
}
