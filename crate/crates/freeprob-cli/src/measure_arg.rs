//! The measure mini-language:
//! `semicircle[:center,radius]`, `mp:lambda`, `uniform:a,b`,
//! `atomic:p1@w1,p2@w2,...` and `json:<path>`.

use freeprob::measures::MeasureDesc;
use freeprob::C64;

fn numbers(s: &str, want: usize, what: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in {what}"))).collect::<Result<_, _>>()?;
    if v.len() != want {
        return Err(format!("{what} takes {want} numbers, got {}", v.len()));
    }
    Ok(v)
}

pub fn parse_measure(spec: &str) -> Result<MeasureDesc, String> {
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (spec, None),
    };
    match (head, rest) {
        ("semicircle", None) => Ok(MeasureDesc::Semicircle { center: 0.0, radius: 2.0 }),
        ("semicircle", Some(r)) => {
            let v = numbers(r, 2, "semicircle")?;
            Ok(MeasureDesc::Semicircle { center: v[0], radius: v[1] })
        }
        ("mp", Some(r)) => Ok(MeasureDesc::MarchenkoPastur { lambda: numbers(r, 1, "mp")?[0] }),
        ("uniform", Some(r)) => {
            let v = numbers(r, 2, "uniform")?;
            Ok(MeasureDesc::Uniform { a: v[0], b: v[1] })
        }
        ("atomic", Some(r)) => {
            let atoms = r
                .split(',')
                .map(|t| {
                    let (p, w) = t.split_once('@').ok_or_else(|| format!("atom {t:?} is not point@weight"))?;
                    let p = p.trim().parse::<f64>().map_err(|_| format!("bad atom location {p:?}"))?;
                    let w = w.trim().parse::<f64>().map_err(|_| format!("bad atom weight {w:?}"))?;
                    Ok((p, w))
                })
                .collect::<Result<Vec<_>, String>>()?;
            Ok(MeasureDesc::Atomic { atoms })
        }
        ("json", Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| format!("bad measure json in {path}: {e}"))
        }
        _ => Err(format!("unknown measure {spec:?}")),
    }
}

/// `re,im` or a bare real.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in point {s:?}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("point {s:?} is not re,im")),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad integer {t:?}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(parse_measure("semicircle").unwrap(), MeasureDesc::Semicircle { center: 0.0, radius: 2.0 });
        assert_eq!(parse_measure("semicircle:3,2").unwrap(), MeasureDesc::Semicircle { center: 3.0, radius: 2.0 });
        assert_eq!(parse_measure("mp:0.5").unwrap(), MeasureDesc::MarchenkoPastur { lambda: 0.5 });
        assert_eq!(parse_measure("uniform:-10,10").unwrap(), MeasureDesc::Uniform { a: -10.0, b: 10.0 });
        assert_eq!(parse_measure("atomic:1@0.5,2@0.5").unwrap(), MeasureDesc::Atomic { atoms: vec![(1.0, 0.5), (2.0, 0.5)] });
        for bad in ["mp", "mp:x", "uniform:1", "atomic:1", "gauss:0,1", "semicircle:1"] {
            assert!(parse_measure(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn points() {
        assert_eq!(parse_complex("3,0").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("-1.5,2").unwrap(), C64::new(-1.5, 2.0));
        assert_eq!(parse_complex("4").unwrap(), C64::new(4.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert_eq!(parse_list("25,50").unwrap(), vec![25, 50]);
    }
}
