use super::ast::{Mode, PrimitiveKind, ProductElement};
use super::normalize::normalize_product;

/// Whether a value produced as `producer` may fill a slot declared as
/// `consumer`.
///
/// Identical primitives and identical aliases are assignable, any alias
/// widens to `enum`, and lists are covariant: `[p]` flows into `[q]` when the
/// normalized products have the same length and are element-wise assignable.
pub fn mode_assignable(producer: &Mode, consumer: &Mode) -> bool {
    match (producer, consumer) {
        (Mode::Primitive(p), Mode::Primitive(c)) => p == c,
        (Mode::EnumAlias(a), Mode::EnumAlias(b)) => a == b,
        (Mode::EnumAlias(_), Mode::Primitive(PrimitiveKind::Enum)) => true,
        (Mode::ListOf(p), Mode::ListOf(q)) => {
            let p = normalize_product(p);
            let q = normalize_product(q);
            p.len() == q.len()
                && p.iter().zip(q.iter()).all(|pair| match pair {
                    (ProductElement::Single(a), ProductElement::Single(b)) => mode_assignable(a, b),
                    _ => false,
                })
        }
        _ => false,
    }
}
