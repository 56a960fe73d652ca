//! The clock example and every single-edit mutation of its model, each
//! with the findings it must produce, worked out by hand.

pub const SPEC: &str = r#"specification clock_specification

requirement requirement_1 states that execution of "clock.tick"
  does not change "clock.hour"
  for clock of type CLOCK
  if in the beginning "clock.minute < 59".

requirement requirement_2 states that execution of "clock.tick"
  increments "clock.minute"
  for clock of type CLOCK
  if in the beginning "clock.minute < 59".
"#;

pub const MODEL: &str = "class CLOCK
  command tick
  query hour : INTEGER
  query minute : INTEGER
end
";

pub struct Mutation {
    pub name: &'static str,
    pub model: &'static str,
    /// `(requirement index, finding code)`, in report order.
    pub expected: &'static [(usize, &'static str)],
}

pub const MUTATIONS: &[Mutation] = &[
    Mutation {
        name: "drop class CLOCK",
        model: "",
        expected: &[(0, "UnknownType"), (1, "UnknownType")],
    },
    Mutation {
        name: "drop tick",
        model: "class CLOCK\n  query hour : INTEGER\n  query minute : INTEGER\nend\n",
        expected: &[(0, "UnknownFeature"), (1, "UnknownFeature")],
    },
    Mutation {
        name: "drop hour",
        model: "class CLOCK\n  command tick\n  query minute : INTEGER\nend\n",
        expected: &[(0, "UnknownFeature")],
    },
    Mutation {
        name: "drop minute",
        model: "class CLOCK\n  command tick\n  query hour : INTEGER\nend\n",
        expected: &[(0, "UnknownFeature"), (1, "UnknownFeature"), (1, "UnknownFeature")],
    },
    Mutation {
        name: "flip tick to a query",
        model: "class CLOCK\n  query tick : INTEGER\n  query hour : INTEGER\n  query minute : INTEGER\nend\n",
        expected: &[(0, "ActionNotCommand"), (1, "ActionNotCommand")],
    },
    Mutation {
        name: "flip hour to a command",
        model: "class CLOCK\n  command tick\n  command hour\n  query minute : INTEGER\nend\n",
        expected: &[(0, "EffectNotQuery")],
    },
    Mutation {
        name: "flip minute to a command",
        model: "class CLOCK\n  command tick\n  query hour : INTEGER\n  command minute\nend\n",
        expected: &[(0, "GuardNotQuery"), (1, "EffectNotQuery"), (1, "GuardNotQuery")],
    },
    Mutation {
        name: "retype hour to BOOLEAN",
        model: "class CLOCK\n  command tick\n  query hour : BOOLEAN\n  query minute : INTEGER\nend\n",
        expected: &[],
    },
    Mutation {
        name: "retype minute to BOOLEAN",
        model: "class CLOCK\n  command tick\n  query hour : INTEGER\n  query minute : BOOLEAN\nend\n",
        expected: &[(1, "NonIntegerTarget")],
    },
    Mutation {
        name: "add a query",
        model: "class CLOCK\n  command tick\n  query hour : INTEGER\n  query minute : INTEGER\n  query second : INTEGER\nend\n",
        expected: &[],
    },
    Mutation {
        name: "add a class",
        model: "class CLOCK\n  command tick\n  query hour : INTEGER\n  query minute : INTEGER\nend\n\nclass CALENDAR\n  query day : INTEGER\nend\n",
        expected: &[],
    },
];
