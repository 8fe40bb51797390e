//! Turns flag values into validated core types.

use aim_core::eigensolver::{resolve_x0, SolverConfig, X0Policy};
use aim_core::problems::gamma_from_dimension;
use aim_core::{parse_potential, Error, Problem, Result};

use crate::args::{ProblemArgs, ProblemKind, SolverArgs};

pub const DEFAULT_ITERS: usize = 12;

fn required<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| Error::Usage(format!("--problem {kind} needs {flag}")))
}

fn gamma(args: &ProblemArgs, kind: &str) -> Result<f64> {
    match (args.gamma, args.n_dim, args.l) {
        (Some(g), None, None) => Ok(g),
        (None, Some(n), l) => gamma_from_dimension(n, l.unwrap_or(0)),
        (None, None, Some(_)) => Err(Error::Usage("--l needs --N".into())),
        (Some(_), _, _) => Err(Error::Usage("give either --gamma or --N/--l, not both".into())),
        (None, None, None) => Err(Error::Usage(format!(
            "--problem {kind} needs --gamma or --N"
        ))),
    }
}

pub fn problem(args: &ProblemArgs) -> Result<Problem> {
    let unused = |flags: &[(&str, bool)], kind: &str| -> Result<()> {
        for (flag, given) in flags {
            if *given {
                return Err(Error::Usage(format!("{flag} does not apply to --problem {kind}")));
            }
        }
        Ok(())
    };
    let g = args.gamma.is_some() || args.n_dim.is_some() || args.l.is_some();
    let a = args.a.is_some();
    let al = args.alpha_exp.is_some();
    let k = args.k.is_some();
    let pot = args.potential.is_some();
    match args.problem {
        ProblemKind::Hermite => {
            unused(&[("--gamma/--N", g), ("--A", a), ("--alpha-exp", al), ("--potential", pot)], "hermite")?;
            Ok(Problem::Hermite {
                k: required(args.k, "--k", "hermite")?,
            })
        }
        ProblemKind::Harmonic1d => {
            unused(
                &[("--gamma/--N", g), ("--A", a), ("--alpha-exp", al), ("--k", k), ("--potential", pot)],
                "harmonic1d",
            )?;
            Ok(Problem::Harmonic1d)
        }
        ProblemKind::Gk => {
            unused(&[("--A", a), ("--alpha-exp", al), ("--k", k), ("--potential", pot)], "gk")?;
            Problem::goldman_krivchenkov(gamma(args, "gk")?)
        }
        ProblemKind::Spiked => {
            unused(&[("--k", k), ("--potential", pot)], "spiked")?;
            Problem::spiked(
                gamma(args, "spiked")?,
                required(args.a, "--A", "spiked")?,
                required(args.alpha_exp, "--alpha-exp", "spiked")?,
            )
        }
        ProblemKind::Quartic => {
            unused(&[("--gamma/--N", g), ("--alpha-exp", al), ("--k", k), ("--potential", pot)], "quartic")?;
            Problem::quartic(required(args.a, "--A", "quartic")?)
        }
        ProblemKind::Custom => {
            unused(&[("--gamma/--N", g), ("--A", a), ("--alpha-exp", al), ("--k", k)], "custom")?;
            let text = required(args.potential.as_deref(), "--potential", "custom")?;
            Problem::custom(parse_potential(text)?)
        }
    }
}

pub fn x0_policy(text: &str, p: &Problem) -> Result<X0Policy> {
    match text.trim() {
        "auto" => Ok(X0Policy::default_for(p)),
        "min" => Ok(X0Policy::PotentialMin),
        "s0zero" => Ok(X0Policy::S0Zero),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(X0Policy::Fixed)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "--x0 must be auto, min, s0zero or a number, got {other:?}"
                ))
            }),
    }
}

pub fn solver(args: &SolverArgs, p: &Problem) -> Result<SolverConfig> {
    let cfg = SolverConfig {
        x0_policy: x0_policy(&args.x0, p)?,
        max_iter: args.iters.unwrap_or(DEFAULT_ITERS),
        jet_order: args.order,
        e_min: args.emin,
        e_max: args.emax,
        e_step: args.estep,
        stab_window: 3.min(args.iters.unwrap_or(DEFAULT_ITERS)),
        root_tol: args.tol,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn policy_name(p: X0Policy) -> String {
    match p {
        X0Policy::Fixed(x) => format!("{x}"),
        X0Policy::PotentialMin => "min".into(),
        X0Policy::S0Zero => "s0zero".into(),
        X0Policy::Zero => "0".into(),
    }
}

/// The settings actually used, as `key=value` pairs.
pub fn describe(p: &Problem, cfg: &SolverConfig) -> Vec<(String, String)> {
    let x0 = match cfg.x0_policy {
        X0Policy::S0Zero => "per bracket (s0zero)".to_string(),
        policy => match resolve_x0(p, policy, 0.0) {
            Ok(x) => format!("{x} ({})", policy_name(policy)),
            Err(e) => format!("unresolved ({e})"),
        },
    };
    vec![
        ("problem".into(), p.name().into()),
        ("params".into(), p.params_json()),
        ("iters".into(), cfg.max_iter.to_string()),
        ("order".into(), cfg.order().to_string()),
        ("x0".into(), x0),
        ("emin".into(), cfg.e_min.to_string()),
        ("emax".into(), cfg.e_max.to_string()),
        ("estep".into(), cfg.e_step.to_string()),
        ("tol".into(), cfg.root_tol.to_string()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: ProblemKind) -> ProblemArgs {
        ProblemArgs {
            problem: kind,
            gamma: None,
            a: None,
            alpha_exp: None,
            k: None,
            n_dim: None,
            l: None,
            potential: None,
        }
    }

    #[test]
    fn builds_each_kind() {
        let mut s = base(ProblemKind::Spiked);
        s.n_dim = Some(5);
        s.a = Some(10.0);
        s.alpha_exp = Some(1.9);
        assert_eq!(problem(&s).unwrap(), Problem::spiked(1.0, 10.0, 1.9).unwrap());

        let mut c = base(ProblemKind::Custom);
        c.potential = Some("x^2 + 0.1*x^4".into());
        assert!(matches!(problem(&c).unwrap(), Problem::Custom { .. }));

        let mut h = base(ProblemKind::Hermite);
        assert!(problem(&h).is_err());
        h.k = Some(2);
        assert_eq!(problem(&h).unwrap(), Problem::Hermite { k: 2 });
    }

    #[test]
    fn rejects_inapplicable_and_conflicting_flags() {
        let mut q = base(ProblemKind::Quartic);
        q.a = Some(0.1);
        q.gamma = Some(1.0);
        assert!(matches!(problem(&q), Err(Error::Usage(_))));

        let mut g = base(ProblemKind::Gk);
        g.gamma = Some(1.0);
        g.n_dim = Some(3);
        assert!(problem(&g).is_err());
    }

    #[test]
    fn x0_values() {
        let p = Problem::quartic(0.1).unwrap();
        assert_eq!(x0_policy("auto", &p).unwrap(), X0Policy::Zero);
        assert_eq!(x0_policy("0.5", &p).unwrap(), X0Policy::Fixed(0.5));
        assert_eq!(x0_policy("min", &p).unwrap(), X0Policy::PotentialMin);
        assert!(x0_policy("nan", &p).is_err());
        assert!(x0_policy("middle", &p).is_err());
    }
}
