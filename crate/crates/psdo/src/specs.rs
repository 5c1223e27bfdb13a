//! Command-line parameter strings: test functions, grids and regions.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use psdo_core::hermite::{gaussian_expansion, HermiteExpansion};
use psdo_core::region::RegionSpec;

/// Splits `"k1=v1,k2=v2"` into pairs.
fn pairs(s: &str) -> Result<Vec<(&str, &str)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or_else(|| anyhow!("expected key=value, got {p:?}"))
        })
        .collect()
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.parse::<T>().with_context(|| format!("invalid value for {key}: {v:?}"))
}

/// `hermite:k=3`, `hermite:k=0+3` (sum of modes), `hermite:k=1;2` (a mode
/// of the tensor basis), or `gaussian:center=c,width=w`.
pub fn parse_test_function(s: &str) -> Result<HermiteExpansion> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| anyhow!("test function {s:?}: expected kind:params"))?;
    match kind {
        "hermite" => {
            let mut out: Option<HermiteExpansion> = None;
            for (k, v) in pairs(rest)? {
                if k != "k" {
                    bail!("hermite test function: unknown key {k:?}");
                }
                for mode in v.split('+') {
                    let idx: Vec<u32> = mode.split(';').map(|m| num("k", m.trim())).collect::<Result<_>>()?;
                    let h = HermiteExpansion::mode(&idx);
                    out = Some(match out {
                        Some(o) if o.dim() != h.dim() => bail!("hermite modes of different dimensions"),
                        Some(o) => o.add(&h),
                        None => h,
                    });
                }
            }
            out.ok_or_else(|| anyhow!("hermite test function needs k"))
        }
        "gaussian" => {
            let (mut center, mut width) = (0.0, 1.0);
            for (k, v) in pairs(rest)? {
                match k {
                    "center" => center = num(k, v)?,
                    "width" => width = num(k, v)?,
                    _ => bail!("gaussian test function: unknown key {k:?}"),
                }
            }
            Ok(gaussian_expansion(center, width, 1e-14, 2000)?)
        }
        _ => bail!("unknown test function kind {kind:?}"),
    }
}

/// `n=1024,xmax=12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub xmax: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n: 1024, xmax: 12.0 }
    }
}

impl std::str::FromStr for GridSpec {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut g = GridSpec::default();
        for (k, v) in pairs(s)? {
            match k {
                "n" => g.n = num(k, v)?,
                "xmax" => g.xmax = num(k, v)?,
                _ => bail!("grid spec: unknown key {k:?}"),
            }
        }
        if g.n < 8 || !(g.xmax > 0.0) {
            bail!("grid spec: need n ≥ 8 and xmax > 0");
        }
        Ok(g)
    }
}

/// `r=2..100,shells=8,dirs=24`; the seed comes from the run configuration.
pub fn parse_region(s: &str, seed: u64) -> Result<RegionSpec> {
    let (mut r_min, mut r_max, mut shells, mut dirs) = (2.0, 100.0, 8usize, 24usize);
    for (k, v) in pairs(s)? {
        match k {
            "r" => {
                let (a, b) = v.split_once("..").ok_or_else(|| anyhow!("region r: expected lo..hi"))?;
                r_min = num(k, a)?;
                r_max = num(k, b)?;
            }
            "shells" => shells = num(k, v)?,
            "dirs" => dirs = num(k, v)?,
            _ => bail!("region spec: unknown key {k:?}"),
        }
    }
    Ok(RegionSpec::new(r_min, r_max, shells, dirs, seed)?)
}

/// Coefficients of an expansion as a JSON-friendly list.
pub fn expansion_records(u: &HermiteExpansion) -> Vec<(Vec<u32>, [f64; 2])> {
    u.coeffs().map(|(k, c): (&[u32], Complex64)| (k.to_vec(), [c.re, c.im])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_functions() {
        let u = parse_test_function("hermite:k=0+3").unwrap();
        assert_eq!(u.coeff(&[0]), Complex64::new(1.0, 0.0));
        assert_eq!(u.coeff(&[3]), Complex64::new(1.0, 0.0));
        let v = parse_test_function("hermite:k=1;2").unwrap();
        assert_eq!(v.dim(), 2);
        let g = parse_test_function("gaussian:center=0,width=1").unwrap();
        assert!((g.coeff(&[0]).re - std::f64::consts::PI.powf(0.25)).abs() < 1e-14);
        assert!(parse_test_function("sine:k=1").is_err());
    }

    #[test]
    fn grid_and_region() {
        let g: GridSpec = "n=512,xmax=10".parse().unwrap();
        assert_eq!(g, GridSpec { n: 512, xmax: 10.0 });
        assert!("n=4".parse::<GridSpec>().is_err());
        let r = parse_region("r=2..50,shells=4,dirs=3", 9).unwrap();
        assert_eq!((r.r_min, r.r_max, r.shells, r.directions, r.seed), (2.0, 50.0, 4, 3, 9));
    }
}
