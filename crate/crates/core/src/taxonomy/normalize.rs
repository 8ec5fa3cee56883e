use super::ast::{Classification, Mode, ModeProduct, ProductElement, RepeatCount};

/// Expands every literal `mode^k` into `k` copies of `mode`, recursively
/// through lists. Symbolic repeats and the wildcard are kept as they are.
pub fn normalize(c: &Classification) -> Classification {
    Classification {
        inference: c.inference,
        inputs: normalize_product(&c.inputs),
        outputs: normalize_product(&c.outputs),
    }
}

pub fn normalize_product(product: &ModeProduct) -> ModeProduct {
    let mut out = Vec::with_capacity(product.len());
    for element in product.iter() {
        match element {
            ProductElement::Single(mode) => out.push(ProductElement::Single(normalize_mode(mode))),
            ProductElement::Repeat(mode, RepeatCount::Literal(k)) => {
                let mode = normalize_mode(mode);
                out.extend((0..*k).map(|_| ProductElement::Single(mode.clone())));
            }
            ProductElement::Repeat(mode, symbolic @ RepeatCount::Symbolic(_)) => out.push(
                ProductElement::Repeat(normalize_mode(mode), symbolic.clone()),
            ),
            ProductElement::Wildcard => out.push(ProductElement::Wildcard),
        }
    }
    ModeProduct(out)
}

pub fn normalize_mode(mode: &Mode) -> Mode {
    match mode {
        Mode::Primitive(kind) => Mode::Primitive(*kind),
        Mode::EnumAlias(name) => Mode::EnumAlias(name.to_ascii_lowercase()),
        Mode::ListOf(inner) => Mode::ListOf(normalize_product(inner)),
    }
}
