//! One handler per subcommand.

use jetalg::division::divide_with_epsilon;
use jetalg::field::parse_positive_rational;
use jetalg::jetsolve::{
    induce_deformation, induce_unfolding, jet_right_equiv, norm_trace, ExtensionTrace, OracleChoice,
};
use jetalg::linalg::Matrix;
use jetalg::parse::{parse_jet, parse_vector};
use jetalg::series::format_module_monomial;
use jetalg::singularity::{
    determinacy_bound, normalize_coefficients, profile, semiuniversal_deformation,
    semiuniversal_unfolding, split, DeterminacyMode, ExactRoots, SplitResult, VersalFamily,
};
use jetalg::standard_basis::{quotient_monomials, std_basis, StandardBasis};
use jetalg::{Error, FieldSpec, Jet, JetRing, JetVector, NormValue, RadiusVector, Result};
use serde_json::{json, Value};

use crate::output::{opt, texts, to_value, Emitter};
use crate::{problem, Command, Common, Mode, OracleArgs, TraceNorms};

pub fn split_names(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn base_ring(c: &Common) -> Result<JetRing> {
    let missing = |what: &str| Error::InvalidInput(format!("--{what} is required"));
    let field: FieldSpec = c.field.as_deref().ok_or_else(|| missing("field"))?.parse()?;
    let vars = split_names(c.vars.as_deref().ok_or_else(|| missing("vars"))?);
    let deg = c.deg.ok_or_else(|| missing("deg"))?;
    if deg < 1 {
        return Err(Error::InvalidInput("--deg must be at least 1".into()));
    }
    JetRing::new(field, &vars, deg)
}

fn extended_ring(base: &JetRing, params: &str) -> Result<JetRing> {
    let names: Vec<String> = base.vars().iter().cloned().chain(split_names(params)).collect();
    JetRing::new(base.field(), &names, base.degree())
}

fn vectors(texts: &[String], ring: &JetRing) -> Result<Vec<JetVector>> {
    texts.iter().map(|t| parse_vector(t, ring)).collect()
}

fn jets(texts: &[String], ring: &JetRing) -> Result<Vec<Jet>> {
    texts.iter().map(|t| parse_jet(t, ring)).collect()
}

pub fn run(common: &Common, command: &Command, em: &mut Emitter) -> Result<()> {
    if let Command::CartanSolve { problem } = command {
        return cartan(problem, common, em);
    }
    let ring = base_ring(common)?;
    em.record(
        "job",
        json!({
            "field": ring.field().to_string(),
            "variables": ring.vars(),
            "truncation": ring.degree(),
        }),
        || vec![format!("field {}, variables {}, truncation {}", ring.field(), ring.vars().join(","), ring.degree())],
    );
    match command {
        Command::Divide { f, divisors, epsilon, no_certificate } => {
            let f = parse_vector(f, &ring)?;
            let divs = vectors(divisors, &ring)?;
            let eps = if *no_certificate { None } else { Some(parse_positive_rational(epsilon)?) };
            let res = divide_with_epsilon(&f, &divs, eps.as_ref())?;
            em.record("division", to_value(&res), || {
                let mut lines: Vec<String> =
                    res.quotients.iter().enumerate().map(|(i, q)| format!("q{} = {q}", i + 1)).collect();
                lines.push(format!("r = {}", res.remainder));
                lines.push(format!("steps = {}", res.steps));
                match (&res.certificate, &res.certificate_note) {
                    (Some(c), _) => {
                        lines.push(format!("certificate: epsilon {}, delta {}", c.epsilon, c.delta));
                        lines.push(format!("  |f| = {}, |r| = {} <= {}", c.norm_f, c.norm_r, c.bound_r));
                        for (j, (n, b)) in c.norm_q.iter().zip(&c.bound_q).enumerate() {
                            lines.push(format!("  |q{}| = {n} <= {b}", j + 1));
                        }
                        lines.push(format!("  bounds hold: {}, verified: {}", c.bounds_hold, c.verified));
                    }
                    (None, Some(note)) => lines.push(format!("certificate: none ({note})")),
                    (None, None) => {}
                }
                lines
            });
        }
        Command::Nf { f, generators } => {
            let f = parse_vector(f, &ring)?;
            let sb = std_basis(&vectors(generators, &ring)?)?;
            let r = sb.normal_form(&f)?;
            em.record("normal_form", json!({ "normal_form": to_value(&r) }), || vec![format!("NF = {r}")]);
        }
        Command::StdBasis { generators } => {
            let sb = std_basis(&vectors(generators, &ring)?)?;
            emit_basis(em, &sb);
        }
        Command::Member { f, generators } => {
            let f = parse_vector(f, &ring)?;
            let sb = std_basis(&vectors(generators, &ring)?)?;
            let r = sb.normal_form(&f)?;
            let member = r.is_zero();
            em.record(
                "membership",
                json!({ "member": member, "normal_form": to_value(&r), "exact": sb.is_exact() }),
                || vec![format!("member = {member}"), format!("NF = {r}")],
            );
        }
        Command::QuotientBasis { generators, maximal } => {
            let sb = std_basis(&vectors(generators, &ring)?)?;
            let qb = quotient_monomials(&sb, *maximal);
            let names: Vec<String> = qb
                .standard_monomials
                .iter()
                .map(|m| format_module_monomial(ring.vars(), m, sb.rank()))
                .collect();
            em.record(
                "quotient_basis",
                json!({ "monomials": names, "complete": qb.complete, "dimension": qb.dimension() }),
                || {
                    vec![
                        format!("monomials: {}", names.join(", ")),
                        format!("dimension = {}", opt(&qb.dimension())),
                    ]
                },
            );
        }
        Command::Profile { f } => {
            let p = profile(&parse_jet(f, &ring)?)?;
            em.record("profile", to_value(&p), || {
                vec![
                    format!("f = {}", p.f),
                    format!("order = {}, differential order = {}", opt(&p.order), opt(&p.diff_order)),
                    format!("mu = {}", opt(&p.milnor)),
                    format!("tau = {}", opt(&p.tjurina)),
                    format!("hessian rank = {}, corank = {}", p.hessian_rank, p.corank),
                ]
            });
        }
        Command::Determinacy { f, mode } => {
            let mode = match mode {
                Mode::Right => DeterminacyMode::Right,
                Mode::Contact => DeterminacyMode::Contact,
            };
            let r = determinacy_bound(&parse_jet(f, &ring)?, mode)?;
            em.record("determinacy", to_value(&r), || {
                vec![
                    format!("k = {}, bound = {}", r.k, r.bound),
                    format!("squared jacobian k = {}", opt(&r.squared_jacobian_k)),
                    format!("best = {}", r.best),
                ]
            });
        }
        Command::Split { f, normalize } => {
            let f = parse_jet(f, &ring)?;
            let mut s = split(&f)?;
            if *normalize {
                s = normalize_coefficients(&s, &ExactRoots { field: ring.field() })?;
            }
            emit_split(em, &s);
        }
        Command::Unfold { f } => {
            let fam = semiuniversal_unfolding(&parse_jet(f, &ring)?)?;
            emit_family(em, &fam);
        }
        Command::VersalDef { f } => {
            let fam = semiuniversal_deformation(&jets(f, &ring)?)?;
            emit_family(em, &fam);
        }
        Command::JetEquiv { f, g, norms } => {
            let f = parse_jet(f, &ring)?;
            let g = parse_jet(g, &ring)?;
            let r = jet_right_equiv(&f, &g)?;
            let phi = texts(&r.phi);
            em.record(
                "right_equivalence",
                json!({ "phi": phi, "determinacy": to_value(&r.determinacy), "verified": r.verified }),
                || {
                    let mut lines: Vec<String> = ring
                        .vars()
                        .iter()
                        .zip(&phi)
                        .map(|(x, p)| format!("{x} -> {p}"))
                        .collect();
                    lines.push(format!("verified = {}", r.verified));
                    lines
                },
            );
            emit_trace(em, &r.trace, norms, 0, ring.nvars())?;
        }
        Command::InduceUnfold { f, g, params, oracle, norms } => {
            let f = parse_jet(f, &ring)?;
            let big = extended_ring(&ring, params)?;
            let g = parse_jet(g, &big)?;
            let fam = semiuniversal_unfolding(&f)?;
            emit_family(em, &fam);
            let nt = big.nvars() - ring.nvars();
            let ind = induce_unfolding(&g, &fam, &oracle_choice(oracle, ring.nvars(), nt)?)?;
            let (phi, big_phi) = (texts(&ind.phi), texts(&ind.big_phi));
            em.record(
                "unfolding_induction",
                json!({ "phi": phi, "Phi": big_phi, "alpha": ind.alpha.to_string(), "verified": ind.verified }),
                || {
                    let mut lines: Vec<String> = fam
                        .parameters
                        .iter()
                        .zip(&phi)
                        .map(|(s, p)| format!("{s} = {p}"))
                        .collect();
                    lines.extend(ring.vars().iter().zip(&big_phi).map(|(x, p)| format!("{x} -> {p}")));
                    lines.push(format!("alpha = {}", ind.alpha));
                    lines.push(format!("verified = {}", ind.verified));
                    lines
                },
            );
            emit_trace(em, &ind.trace, norms, ring.nvars(), nt)?;
        }
        Command::InduceDef { f, g, params, m0, oracle, norms } => {
            let f = jets(f, &ring)?;
            let big = extended_ring(&ring, params)?;
            let g = jets(g, &big)?;
            let m0 = m0.as_deref().map(|t| parse_matrix(t, ring.field())).transpose()?;
            let fam = semiuniversal_deformation(&f)?;
            emit_family(em, &fam);
            let ns = big.nvars() - ring.nvars();
            let ind = induce_deformation(&g, &fam, m0.as_ref(), &oracle_choice(oracle, ring.nvars(), ns)?)?;
            let (phi, big_phi) = (texts(&ind.phi), texts(&ind.big_phi));
            let m: Vec<Vec<String>> = ind.m.iter().map(|row| texts(row)).collect();
            em.record(
                "deformation_induction",
                json!({ "phi": phi, "Phi": big_phi, "M": m, "verified": ind.verified }),
                || {
                    let mut lines: Vec<String> = fam
                        .parameters
                        .iter()
                        .zip(&phi)
                        .map(|(t, p)| format!("{t} = {p}"))
                        .collect();
                    lines.extend(ring.vars().iter().zip(&big_phi).map(|(x, p)| format!("{x} -> {p}")));
                    lines.extend(m.iter().map(|row| format!("M row: {}", row.join(", "))));
                    lines.push(format!("verified = {}", ind.verified));
                    lines
                },
            );
            emit_trace(em, &ind.trace, norms, ring.nvars(), ns)?;
        }
        Command::CartanSolve { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn cartan(path: &std::path::Path, common: &Common, em: &mut Emitter) -> Result<()> {
    let p = problem::load(path, common)?;
    em.record(
        "job",
        json!({
            "field": p.ring.field().to_string(),
            "variables": p.ring.vars(),
            "parameters": p.s_vars,
            "truncation": p.ring.degree(),
            "s_degree": p.degree,
        }),
        || {
            vec![format!(
                "field {}, variables {}, parameters {}, truncation {}",
                p.ring.field(),
                p.ring.vars().join(","),
                p.s_vars.join(","),
                p.ring.degree()
            )]
        },
    );
    let sol = jetalg::cartan::cartan_solve(&p)?;
    em.record("cartan_solution", to_value(&sol), || {
        let mut lines: Vec<String> = (0..sol.z.len()).map(|i| format!("z{} = {}", i + 1, sol.z_text(i))).collect();
        lines.extend((0..sol.y.len()).map(|j| format!("y{} = {}", j + 1, sol.y_text(j))));
        lines.push(format!("rho = {}, tau = {}", sol.rho, sol.tau));
        lines.push(format!("L = {} (proof constant {}, reduced {})", sol.l, sol.l_proof, sol.l0));
        lines.push(format!("|C| = {}", sol.norm_c));
        lines.push(format!("identity verified = {}, bounds verified = {}", sol.identity_verified, sol.bounds_verified));
        lines
    });
    Ok(())
}

fn emit_basis(em: &mut Emitter, sb: &StandardBasis) {
    let ring = sb.ring();
    let gens = texts(sb.generators());
    let leading: Vec<String> = sb
        .leading_monomials()
        .iter()
        .map(|m| format_module_monomial(ring.vars(), m, sb.rank()))
        .collect();
    let transcript: Vec<Vec<String>> = sb.transcript().iter().map(|row| texts(row)).collect();
    em.record(
        "standard_basis",
        json!({
            "generators": gens,
            "leading": leading,
            "transcript": transcript,
            "complete_level": sb.complete_level(),
            "exact": sb.is_exact(),
        }),
        || {
            let mut lines: Vec<String> = gens
                .iter()
                .zip(&leading)
                .enumerate()
                .map(|(i, (g, l))| format!("g{} = {g}    (LM {l})", i + 1))
                .collect();
            for (i, row) in transcript.iter().enumerate() {
                lines.push(format!("g{} = {}", i + 1, combination(row)));
            }
            lines.push(format!("complete level = {}", opt(&sb.complete_level())));
            lines
        },
    );
}

/// `(c1)*f1 + (c2)*f2 + …` skipping zero coefficients.
fn combination(row: &[String]) -> String {
    let parts: Vec<String> = row
        .iter()
        .enumerate()
        .filter(|(_, c)| c.as_str() != "0")
        .map(|(i, c)| format!("({c})*f{}", i + 1))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn emit_split(em: &mut Emitter, s: &SplitResult) {
    let vars = s.f.ring().vars().to_vec();
    let transform = texts(&s.transform);
    let kind = s.char2_type.map(|t| format!("{t:?}").to_lowercase());
    em.record(
        "split",
        json!({
            "f": s.f.to_string(),
            "characteristic": s.characteristic,
            "rank": s.rank,
            "corank": vars.len() - s.rank,
            "transform": transform,
            "quadratic_part": s.quadratic_part.to_string(),
            "residual": s.residual.to_string(),
            "normal_form": (&s.quadratic_part + &s.residual).to_string(),
            "coefficients": texts(&s.coefficients),
            "diagonal": texts(&s.diagonal),
            "type": kind,
            "normalized": s.normalized,
            "verified": s.verified,
        }),
        || {
            let mut lines = vec![
                format!("rank = {}, corank = {}", s.rank, vars.len() - s.rank),
                format!("quadratic part = {}", s.quadratic_part),
                format!("residual = {}", s.residual),
            ];
            if let Some(k) = &kind {
                lines.push(format!("type = {k}"));
            }
            lines.extend(vars.iter().zip(&transform).map(|(x, p)| format!("{x} -> {p}")));
            lines.push(format!("verified = {}", s.verified));
            lines
        },
    );
}

fn emit_family(em: &mut Emitter, fam: &VersalFamily) {
    em.record("family", to_value(fam), || {
        let mut lines: Vec<String> = fam.family.iter().map(|g| format!("F = {g}")).collect();
        lines.push(format!("parameters: {}", fam.parameters.join(", ")));
        lines.push(format!("cofactors: {}", fam.cofactor_text().join(", ")));
        lines
    });
}

fn key_values(text: &str) -> Result<Vec<(String, String)>> {
    text.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, found `{kv}`")))
        })
        .collect()
}

fn radii(text: &str, nx: usize, ns: usize) -> Result<(RadiusVector, RadiusVector, Option<NormValue>)> {
    let (mut rho, mut tau, mut l) = (None, None, None);
    for (k, v) in key_values(text)? {
        match k.as_str() {
            "rho" => rho = Some(problem::radius(&v, nx)?),
            "tau" => tau = Some(problem::radius(&v, ns)?),
            "L" => l = Some(NormValue::new(parse_positive_rational(&v)?)),
            other => return Err(Error::InvalidInput(format!("unknown key `{other}`"))),
        }
    }
    let rho = match rho {
        Some(r) => r,
        None if nx == 0 => RadiusVector::new(Vec::new())?,
        None => return Err(Error::InvalidInput("rho is required".into())),
    };
    let tau = tau.ok_or_else(|| Error::InvalidInput("tau is required".into()))?;
    Ok((rho, tau, l))
}

fn oracle_choice(args: &OracleArgs, nx: usize, ns: usize) -> Result<OracleChoice> {
    match &args.cartan {
        None => Ok(OracleChoice::Lift),
        Some(text) => {
            let (rho, tau, _) = radii(text, nx, ns)?;
            Ok(OracleChoice::Cartan { rho, tau })
        }
    }
}

fn emit_trace(em: &mut Emitter, trace: &ExtensionTrace, norms: &TraceNorms, nx: usize, ns: usize) -> Result<()> {
    for r in &trace.records {
        let (res, u, v) = (texts(&r.residual), texts(&r.u), texts(&r.v));
        em.record(
            "trace",
            json!({ "degree": r.degree, "residual": res, "u": u, "v": v }),
            || {
                vec![format!(
                    "degree {}: residual [{}], u [{}], v [{}]",
                    r.degree,
                    res.join(", "),
                    u.join(", "),
                    v.join(", ")
                )]
            },
        );
    }
    let Some(text) = &norms.trace_norms else {
        return Ok(());
    };
    let (rho, tau, l) = radii(text, nx, ns)?;
    let l = l.ok_or_else(|| Error::InvalidInput("L is required".into()))?;
    let rep = norm_trace(trace, &rho, &tau, &l)?;
    let value: Value = to_value(&rep);
    em.record("trace_norms", value, || {
        let mut lines: Vec<String> = rep
            .rows
            .iter()
            .map(|row| {
                format!(
                    "degree {}: |F| = {}, |u| = [{}], |v| = [{}], within L: {}",
                    row.degree,
                    row.residual,
                    texts(&row.u).join(", "),
                    texts(&row.v).join(", "),
                    row.within_bound
                )
            })
            .collect();
        lines.push(format!("L = {}, all within: {}, first violation: {}", rep.bound, rep.all_within_bound, rep.first_violation.map_or_else(|| "none".to_string(), |d| d.to_string())));
        lines.push(format!(
            "half-radius sums: y {}, z {}, below 2L: {}",
            rep.y_half_norm, rep.z_half_norm, rep.geometric_ok
        ));
        lines
    });
    Ok(())
}

/// Rows separated by `;`, entries by `,`.
fn parse_matrix(text: &str, field: FieldSpec) -> Result<Matrix> {
    text.split(';')
        .map(|row| row.split(',').map(|c| field.parse_scalar(c.trim())).collect())
        .collect()
}
