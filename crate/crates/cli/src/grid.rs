use crate::usage;

/// Parses `start:step:stop` (inclusive), a comma-separated list, or a single value.
pub fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let number = |s: &str| -> anyhow::Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| usage(format!("not a number in SNR grid: {s:?}")))?;
        if !v.is_finite() {
            return Err(usage(format!("SNR grid value {s:?} is not finite")));
        }
        Ok(v)
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (number(start)?, number(step)?, number(stop)?);
            if step <= 0.0 || stop < start {
                return Err(usage(format!(
                    "grid {text:?} needs a positive step and start <= stop"
                )));
            }
            let span = (stop - start) / step;
            let count = if (span - span.round()).abs() <= 1e-9 {
                span.round()
            } else {
                span.floor()
            } as usize;
            if count > 1_000_000 {
                return Err(usage(format!("grid {text:?} has too many points")));
            }
            // rounded to 12 decimals so 0.1-style steps print cleanly
            Ok((0..=count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect())
        }
        [single] => single.split(',').map(number).collect(),
        _ => Err(usage(format!(
            "SNR grid {text:?} is not start:step:stop or a list"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_lists_and_singles() {
        let g = parse_grid("-20:1:20").unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!((g[0], g[40]), (-20.0, 20.0));
        assert_eq!(parse_grid("0:0.1:0.3").unwrap(), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("0:2:5").unwrap(), vec![0.0, 2.0, 4.0]);
        assert_eq!(parse_grid("5,10,15").unwrap(), vec![5.0, 10.0, 15.0]);
        assert_eq!(parse_grid("-3").unwrap(), vec![-3.0]);
        for bad in ["", "1:0:3", "3:1:1", "a", "1:2", "1:2:3:4", "nan"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
