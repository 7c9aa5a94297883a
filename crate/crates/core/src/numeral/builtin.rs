use std::collections::BTreeMap;

use thiserror::Error;

use super::{tokenize, Numeral, NumeralSystem, SystemSource};

/// Built-in reference systems.
///
/// `Mandarin` and `Base(10)` share the same decimal construction; `Base(20)`
/// is purely vigesimal with atoms 1..=19 and 20; `FrenchLike` switches from
/// decimal to vigesimal in the upper decades; `BasqueLike` is vigesimal with
/// a decimal sub-base, so 91 comes out as `4*20+10+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinName {
    Mandarin,
    Base(u32),
    FrenchLike,
    BasqueLike,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown builtin system {0:?}")]
pub struct UnknownBuiltin(pub String);

impl std::str::FromStr for BuiltinName {
    type Err = UnknownBuiltin;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mandarin" => Ok(BuiltinName::Mandarin),
            "base10" => Ok(BuiltinName::Base(10)),
            "base20" => Ok(BuiltinName::Base(20)),
            "french_like" => Ok(BuiltinName::FrenchLike),
            "basque_like" => Ok(BuiltinName::BasqueLike),
            other => Err(UnknownBuiltin(other.to_string())),
        }
    }
}

impl std::fmt::Display for BuiltinName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuiltinName::Mandarin => write!(f, "mandarin"),
            BuiltinName::Base(b) => write!(f, "base{b}"),
            BuiltinName::FrenchLike => write!(f, "french_like"),
            BuiltinName::BasqueLike => write!(f, "basque_like"),
        }
    }
}

/// Names accepted by [`builtin_system`], for CLI help and enumeration.
pub fn builtin_names() -> &'static [&'static str] {
    &["mandarin", "base10", "base20", "french_like", "basque_like"]
}

/// Constructs a built-in system. Panics on `Base(b)` with `b` outside
/// `{10, 20}`; use the `FromStr` names for user input.
pub fn builtin_system(name: BuiltinName) -> NumeralSystem {
    let mut forms: BTreeMap<u32, String> = BTreeMap::new();
    match name {
        BuiltinName::Mandarin => fill_pure_base(&mut forms, 10),
        BuiltinName::Base(b @ (10 | 20)) => fill_pure_base(&mut forms, b),
        BuiltinName::Base(b) => panic!("unsupported base {b}; expected 10 or 20"),
        BuiltinName::FrenchLike => fill_french_like(&mut forms),
        BuiltinName::BasqueLike => fill_basque_like(&mut forms),
    }
    let numerals: BTreeMap<u32, Numeral> = forms
        .into_iter()
        .map(|(n, text)| {
            let numeral = tokenize(&text).expect("builtin forms are well-formed");
            debug_assert_eq!(numeral.evaluate(), i64::from(n));
            (n, numeral)
        })
        .collect();
    NumeralSystem::new(name.to_string(), numerals, SystemSource::Builtin)
}

/// Atoms 1..b-1 and b; then `q*b`, `b+r`, `q*b+r` as needed.
fn fill_pure_base(forms: &mut BTreeMap<u32, String>, base: u32) {
    for n in 1..=99u32 {
        let text = if n < base {
            n.to_string()
        } else if n == base {
            base.to_string()
        } else {
            let q = n / base;
            let r = n % base;
            match (q, r) {
                (1, r) => format!("{base}+{r}"),
                (q, 0) => format!("{q}*{base}"),
                (q, r) => format!("{q}*{base}+{r}"),
            }
        };
        forms.insert(n, text);
    }
}

/// Decimal through 69, then `3*20(+10)` for the 70s, `4*20` for the 80s and
/// `4*20+10` for the 90s.
fn fill_french_like(forms: &mut BTreeMap<u32, String>) {
    fill_pure_base(forms, 10);
    for n in 70..=99u32 {
        let text = match n {
            70 => "3*20+10".to_string(),
            71..=79 => format!("3*20+10+{}", n - 70),
            80 => "4*20".to_string(),
            81..=89 => format!("4*20+{}", n - 80),
            90 => "4*20+10".to_string(),
            _ => format!("4*20+10+{}", n - 90),
        };
        forms.insert(n, text);
    }
}

/// Vigesimal with a decimal sub-base: each score is `q*20`, the following
/// ten adds `+10`, and units are appended.
fn fill_basque_like(forms: &mut BTreeMap<u32, String>) {
    for n in 1..=99u32 {
        let score = n / 20;
        let rem = n % 20;
        let mut text = match score {
            0 => String::new(),
            1 => "20".to_string(),
            q => format!("{q}*20"),
        };
        let mut push = |part: &str| {
            if !text.is_empty() {
                text.push('+');
            }
            text.push_str(part);
        };
        match rem {
            0 => {}
            1..=9 => push(&rem.to_string()),
            10 => push("10"),
            _ => {
                push("10");
                push(&(rem - 10).to_string());
            }
        }
        forms.insert(n, text);
    }
}
