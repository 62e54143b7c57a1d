//! Textual names for weights and couples.
//!
//! Couples: `l1-l1inv`, `weighted-l1:W0,W1`, `l1-linf`, `ces`,
//! `l1w-cesinf[:W0]`, `l1-cesinf-halfline`, `discrete`, each optionally
//! followed by `@a,b` to restrict to functions supported in `[a, b]`.
//! Weights: `one`, `inv-t`, `log-inv`, `log-e`, `one-minus-t`.

use ces_interp::kfun::Couple;
use ces_interp::norms::Weight;

use crate::CliError;

pub fn weight(s: &str) -> Result<Weight, CliError> {
    Ok(match s {
        "one" => Weight::One,
        "inv-t" => Weight::InvT,
        "log-inv" => Weight::LogInv,
        "log-e" => Weight::LogE,
        "one-minus-t" => Weight::OneMinusT,
        _ => return Err(CliError::Usage(format!("unknown weight `{s}`"))),
    })
}

pub fn couple(s: &str) -> Result<Couple, CliError> {
    let (head, support) = match s.split_once('@') {
        Some((h, r)) => {
            let (a, b) = r
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("`{r}` is not `a,b`")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("`{x}` is not a number")))
            };
            (h, Some((num(a)?, num(b)?)))
        }
        None => (s, None),
    };
    let (name, args) = match head.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (head, None),
    };
    let base = match (name, args) {
        ("l1-l1inv", None) => Couple::WeightedL1 {
            w0: Weight::One,
            w1: Weight::InvT,
        },
        ("weighted-l1", Some(a)) => {
            let (w0, w1) = a
                .split_once(',')
                .ok_or_else(|| CliError::Usage("weighted-l1 needs two weights".into()))?;
            Couple::WeightedL1 {
                w0: weight(w0)?,
                w1: weight(w1)?,
            }
        }
        ("l1-linf", None) => Couple::L1Linf,
        ("ces", None) => Couple::Ces1CesInfUnit,
        ("l1w-cesinf", w) => Couple::L1wCesInf {
            w0: weight(w.unwrap_or("one-minus-t"))?,
        },
        ("l1-cesinf-halfline", None) => Couple::L1CesInfHalfLine,
        ("discrete", None) => Couple::DiscreteL1L1InvK,
        _ => return Err(CliError::Usage(format!("unknown couple `{s}`"))),
    };
    Ok(match support {
        Some((a, b)) if a < b => Couple::restricted(base, a, b),
        Some(_) => return Err(CliError::Usage("restriction needs a < b".into())),
        None => base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_couples() {
        assert_eq!(couple("ces").unwrap(), Couple::Ces1CesInfUnit);
        assert_eq!(
            couple("weighted-l1:log-e,one").unwrap(),
            Couple::WeightedL1 {
                w0: Weight::LogE,
                w1: Weight::One
            }
        );
        assert_eq!(
            couple("l1w-cesinf@0.5,1").unwrap(),
            Couple::restricted(Couple::L1wCesInf { w0: Weight::OneMinusT }, 0.5, 1.0)
        );
        assert!(couple("ces:one").is_err());
        assert!(couple("nope").is_err());
        assert!(couple("ces@1,0.5").is_err());
    }
}
