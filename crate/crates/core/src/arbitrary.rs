//! Proptest strategies producing valid fragments, requirements and
//! specifications. Enabled by the `proptest` feature.

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::sample::{select, subsequence};

use crate::fragment::{Arith, BoolExpr, CompareOp, Fragment, QualifiedCall, QueryPath};
use crate::ident::{Identifier, TypeName};
use crate::model::{EffectKind, Requirement, Specification, VariableBinding};

const KEYWORDS: [&str; 5] = ["and", "or", "not", "True", "False"];

/// Identifiers usable inside fragments (fragment keywords excluded).
pub fn identifier() -> impl Strategy<Value = Identifier> {
    "[a-zA-Z][a-zA-Z0-9_]{0,7}"
        .prop_filter("fragment keyword", |s| !KEYWORDS.contains(&s.as_str()))
        .prop_map(|s| Identifier::new(s).expect("matches the identifier rule"))
}

pub fn type_name() -> impl Strategy<Value = TypeName> {
    "[A-Z][A-Z0-9_]{0,6}".prop_map(|s| TypeName::new(s).expect("matches the identifier rule"))
}

fn path_under(roots: Vec<Identifier>) -> impl Strategy<Value = (Identifier, Vec<Identifier>)> {
    (select(roots), vec(identifier(), 1..=3))
}

pub fn query_under(roots: Vec<Identifier>) -> impl Strategy<Value = QueryPath> {
    path_under(roots).prop_map(|(root, path)| QueryPath::new(root, path).expect("nonempty path"))
}

pub fn call_under(roots: Vec<Identifier>) -> impl Strategy<Value = QualifiedCall> {
    path_under(roots).prop_map(|(root, path)| QualifiedCall::new(root, path).expect("nonempty path"))
}

pub fn compare_op() -> impl Strategy<Value = CompareOp> {
    select(CompareOp::ALL.to_vec())
}

pub fn arith_under(roots: Vec<Identifier>, depth: u32) -> impl Strategy<Value = Arith> {
    let leaf = prop_oneof![
        query_under(roots).prop_map(Arith::Query),
        any::<i64>().prop_map(Arith::Int),
        (0i64..100).prop_map(Arith::Int),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Arith::add(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Arith::sub(l, r)),
        ]
    })
}

/// Conditions over `roots`; `roots` may be empty, giving constant guards.
pub fn bool_expr_under(roots: Vec<Identifier>, depth: u32) -> BoxedStrategy<BoolExpr> {
    let arith = if roots.is_empty() {
        prop_oneof![
            any::<i64>().prop_map(Arith::Int),
            (0i64..100).prop_map(Arith::Int)
        ]
        .boxed()
    } else {
        arith_under(roots, 2).boxed()
    };
    let leaf = prop_oneof![
        4 => (arith.clone(), compare_op(), arith).prop_map(|(l, op, r)| BoolExpr::compare(l, op, r)),
        1 => Just(BoolExpr::True),
        1 => Just(BoolExpr::False),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BoolExpr::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| BoolExpr::or(l, r)),
            inner.prop_map(BoolExpr::not),
        ]
    })
    .boxed()
}

pub fn bool_expr(depth: u32) -> BoxedStrategy<BoolExpr> {
    vec(identifier(), 0..3)
        .prop_flat_map(move |roots| bool_expr_under(roots, depth))
        .boxed()
}

fn effect_under(roots: Vec<Identifier>) -> impl Strategy<Value = EffectKind> {
    (0..3u8, query_under(roots)).prop_map(|(k, q)| match k {
        0 => EffectKind::DoesNotChange(q),
        1 => EffectKind::Increments(q),
        _ => EffectKind::Decrements(q),
    })
}

/// A valid requirement labelled `label`.
pub fn requirement_labelled(label: Identifier) -> impl Strategy<Value = Requirement> {
    (btree_set(identifier(), 1..=3), vec(type_name(), 3))
        .prop_flat_map(move |(vars, types)| {
            let vars: Vec<Identifier> = vars.into_iter().collect();
            let bindings: Vec<VariableBinding> = vars
                .iter()
                .zip(types)
                .map(|(v, t)| VariableBinding::new(v.clone(), t))
                .collect();
            let guard_roots = subsequence(vars.clone(), 0..=vars.len());
            (
                Just(label.clone()),
                call_under(vars.clone()),
                effect_under(vars.clone()),
                Just(bindings),
                prop::option::of(guard_roots.prop_flat_map(|roots| bool_expr_under(roots, 3))),
            )
        })
        .prop_map(|(label, action, effect, bindings, guard)| {
            Requirement::new(label, action, effect, bindings, guard).expect("generated requirement is valid")
        })
}

pub fn requirement() -> impl Strategy<Value = Requirement> {
    identifier().prop_flat_map(requirement_labelled)
}

/// A valid specification with up to `max_requirements` requirements.
pub fn specification(max_requirements: usize) -> impl Strategy<Value = Specification> {
    (identifier(), btree_set(identifier(), 0..=max_requirements))
        .prop_flat_map(|(name, labels)| {
            let reqs: Vec<_> = labels.into_iter().map(requirement_labelled).collect();
            (Just(name), reqs)
        })
        .prop_shuffle_requirements()
}

trait ShuffleRequirements {
    fn prop_shuffle_requirements(self) -> BoxedStrategy<Specification>;
}

impl<S> ShuffleRequirements for S
where
    S: Strategy<Value = (Identifier, Vec<Requirement>)> + 'static,
{
    /// Labels come out of a set in sorted order; shuffle so authoring order
    /// is not always alphabetical.
    fn prop_shuffle_requirements(self) -> BoxedStrategy<Specification> {
        self.prop_flat_map(|(name, reqs)| (Just(name), Just(reqs).prop_shuffle()))
            .prop_map(|(name, reqs)| {
                let mut spec = Specification::new(name);
                for r in reqs {
                    spec.add_requirement(r).expect("labels are distinct");
                }
                spec
            })
            .boxed()
    }
}

/// The text arguments of one builder chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainArgs {
    pub label: String,
    pub call: String,
    /// `does_not_change`, `increments` or `decrements`.
    pub effect: &'static str,
    pub query: String,
    pub bindings: Vec<(String, String)>,
    pub guard: Option<String>,
}

impl ChainArgs {
    pub fn of(req: &Requirement) -> Self {
        ChainArgs {
            label: req.label().to_string(),
            call: req.action().render(),
            effect: req.effect().keyword(),
            query: req.effect().target().render(),
            bindings: req
                .bindings()
                .iter()
                .map(|b| (b.variable.to_string(), b.declared_type.to_string()))
                .collect(),
            guard: req.guard().map(|g| g.render()),
        }
    }
}

/// Chain arguments for valid requirements.
pub fn chain_args() -> impl Strategy<Value = ChainArgs> {
    requirement().prop_map(|r| ChainArgs::of(&r))
}
