//! Runs generated phrase chains through the staged builder.

use specogram::arbitrary::ChainArgs;
use specogram::vocabulary::*;
use specogram::Specification;

/// The specification `name` built by running every chain to its period.
pub fn build(name: &str, chains: &[ChainArgs]) -> Specification {
    let mut spec = Specification::further_referred_to_as(name).unwrap();
    for args in chains {
        let effect = spec
            .requirement(&args.label)
            .unwrap()
            .states_that_execution_of(&args.call)
            .unwrap();
        let effect = match args.effect {
            "does_not_change" => effect.does_not_change(&args.query),
            "increments" => effect.increments(&args.query),
            _ => effect.decrements(&args.query),
        }
        .unwrap();
        let (first, rest) = args.bindings.split_first().unwrap();
        let mut typed = effect.for_(&first.0).unwrap().of_type(&first.1).unwrap();
        for (v, t) in rest {
            typed = typed.for_(v).unwrap().of_type(t).unwrap();
        }
        match &args.guard {
            Some(g) => typed.if_in_the_beginning(g).unwrap().period().unwrap(),
            None => typed.period().unwrap(),
        }
    }
    spec
}
