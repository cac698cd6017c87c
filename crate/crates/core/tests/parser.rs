use pie_core::expr::{parse, BinOp, Expression, Node, ParseError, Var};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Node> {
    prop_oneof![
        (0u32..1000).prop_map(|v| Node::Const(v as f64 / 8.0)),
        prop_oneof![Just(Var::X), Just(Var::S), Just(Var::Y)].prop_map(Node::Var),
    ]
}

fn tree() -> impl Strategy<Value = Node> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|n| Node::Neg(Box::new(n))),
            (
                prop_oneof![
                    Just(BinOp::Add),
                    Just(BinOp::Sub),
                    Just(BinOp::Mul),
                    Just(BinOp::Div),
                    Just(BinOp::Pow)
                ],
                inner.clone(),
                inner
            )
                .prop_map(|(op, a, b)| Node::Binary(op, Box::new(a), Box::new(b))),
        ]
    })
}

/// Fully parenthesized rendering, independent of the minimal printer.
fn explicit(n: &Node) -> String {
    match n {
        Node::Const(v) => format!("{v}"),
        Node::Var(v) => v.name().to_string(),
        Node::Neg(a) => format!("(-{})", explicit(a)),
        Node::Call(f, a) => format!("{}({})", f.name(), explicit(a)),
        Node::Binary(op, a, b) => {
            let sym = match op {
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Div => "/",
                BinOp::Pow => "^",
            };
            format!("({}{sym}{})", explicit(a), explicit(b))
        }
    }
}

proptest! {
    #[test]
    fn pretty_round_trip(ast in tree()) {
        let e = Expression::from_ast(ast);
        let text = e.pretty();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.pretty(), text);
    }

    #[test]
    fn minimal_printing_keeps_meaning(ast in tree()) {
        let e = Expression::from_ast(ast.clone());
        prop_assert_eq!(parse(&explicit(&ast)).unwrap(), e.clone());
        let (x, s, y) = (0.37, 1.21, 0.58);
        let a = parse(&e.pretty()).unwrap().evaluate(x, s, y);
        let b = e.evaluate(x, s, y);
        prop_assert_eq!(a.ok().map(f64::to_bits), b.ok().map(f64::to_bits));
    }

    #[test]
    fn left_associative_chains(vals in proptest::collection::vec(1u32..50, 2..6)) {
        let sub = vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" - ");
        let want = vals[1..].iter().fold(vals[0] as f64, |acc, &v| acc - v as f64);
        prop_assert_eq!(parse(&sub).unwrap().evaluate(0.0, 0.0, 0.0).unwrap(), want);
        let div = vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" / ");
        let want = vals[1..].iter().fold(vals[0] as f64, |acc, &v| acc / v as f64);
        prop_assert_eq!(parse(&div).unwrap().evaluate(0.0, 0.0, 0.0).unwrap(), want);
    }

    #[test]
    fn arbitrary_input_never_panics(text in "\\PC{0,40}") {
        if let Err(e) = parse(&text) {
            if let Some(offset) = e.offset() {
                prop_assert!(offset <= text.len());
            }
        }
    }
}

#[test]
fn power_is_right_associative_and_binds_tighter_than_minus() {
    let ev = |t: &str| parse(t).unwrap().evaluate(0.0, 0.0, 0.0).unwrap();
    assert_eq!(ev("2^3^2"), 512.0);
    assert_eq!(ev("-2^2"), -4.0);
    assert_eq!(ev("2^-1"), 0.5);
    assert_eq!(ev("1 + 2 * 3 ^ 2"), 19.0);
}

#[test]
fn exp_difference_kernel_has_three_variables() {
    let e = parse("exp(x−s)*y").unwrap();
    assert_eq!(e.free_variables().len(), 3);
    assert_eq!(e, parse("exp(x-s)*y").unwrap());
}

#[test]
fn errors_carry_offsets() {
    assert_eq!(parse(""), Err(ParseError::Empty));
    assert_eq!(parse("x + * s").unwrap_err().offset(), Some(4));
    assert!(parse("((x)").is_err());
}
