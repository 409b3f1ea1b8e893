use serde::Serialize;
use serde_json::json;

use torus_pmra::analysis::{
    check_refinement, check_unit_lattice_norm, haar_tensor, xi_membership, BoxGrid, Section,
    TorusGrid,
};
use torus_pmra::filters::{haar_filter_bank, tensor_filter, verify_filter_bank};
use torus_pmra::frames::{
    band_limited_generators, gram_report, generate_frame, test_corpus, verify_reconstruction_many,
    FrameSet,
};
use torus_pmra::ktheory::{
    class_of_module, dilate_class, pmra_level_class, pmra_level_closed_form, wavelet_class,
    ExtElement, KClass, ModuleDescriptor,
};
use torus_pmra::lattice::{
    coset_table_with_cap, gcd::gcd3, sl3_with_cofactors, validate_dilation, DilationSpec,
    FormHint, IntMatrix,
};

use crate::config::{default_grid, Defaults, FileConfig, Overrides, RunConfig, DEFAULT_TOL};
use crate::output::canonical_json;
use crate::{Cli, CliError, Command, Format, K0Command, ModuleArgs, Outcome, VerifyCommand};

/// Half-width of the box used for frequency-domain comparisons.
const BOX_HALF_WIDTH: f64 = 8.0;

fn envelope<T: Serialize>(
    command: &str,
    pass: bool,
    cfg: Option<&RunConfig>,
    report: T,
) -> Result<Outcome, CliError> {
    let mut v = json!({
        "schema": 1,
        "command": command,
        "pass": pass,
        "report": serde_json::to_value(report)?,
    });
    if let Some(c) = cfg {
        v["config"] = serde_json::to_value(c)?;
    }
    Ok(Outcome {
        text: canonical_json(&v)?,
        pass,
    })
}

fn matrix_arg(text: &str, what: &str) -> Result<IntMatrix, CliError> {
    IntMatrix::from_json(text).map_err(|e| CliError::Usage(format!("bad {what}: {e}")))
}

fn spec(cli: &Cli, default: Option<&str>) -> Result<DilationSpec, CliError> {
    let text = cli
        .global
        .matrix
        .as_deref()
        .or(default)
        .ok_or_else(|| CliError::Usage("--matrix is required".into()))?;
    let hint = match &cli.global.conjugator {
        Some(s) => Some(FormHint::ConjugatedBy(matrix_arg(s, "--conjugator")?)),
        None => None,
    };
    Ok(validate_dilation(matrix_arg(text, "--matrix")?, hint)?)
}

fn diagonal_factors(spec: &DilationSpec) -> Result<Vec<i64>, CliError> {
    if !spec.is_diagonal() {
        return Err(CliError::Usage("this command needs a diagonal --matrix".into()));
    }
    Ok(spec.matrix().diagonal_entries())
}

fn section_arg(text: &str) -> Result<Section, CliError> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => text.to_string(),
    };
    let s: Section =
        serde_json::from_str(&body).map_err(|e| CliError::Usage(format!("bad section: {e}")))?;
    s.validate()?;
    Ok(s)
}

fn module(args: &ModuleArgs) -> Result<ModuleDescriptor, CliError> {
    Ok(match &args.module_conjugator {
        Some(b) => ModuleDescriptor::with_conjugator(
            args.q,
            args.twists.clone(),
            matrix_arg(b, "--module-conjugator")?,
        )?,
        None => ModuleDescriptor::new(args.q, args.twists.clone())?,
    })
}

fn class_json(c: &KClass) -> serde_json::Value {
    json!({ "element": c, "display": c.to_string() })
}

fn resolve(flags: &Overrides, file: &FileConfig, n: usize, depth: u32, tol: f64) -> Result<RunConfig, CliError> {
    RunConfig::resolve(
        flags,
        file,
        Defaults {
            grid: default_grid(n),
            depth,
            tol,
        },
    )
}

pub fn dispatch(cli: &Cli, flags: &Overrides, file: &FileConfig) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Cosets { format } => cosets(cli, flags, file, *format),
        Command::K0(k) => k0(cli, flags, file, k),
        Command::Verify(v) => verify(cli, flags, file, v),
    }
}

fn cosets(
    cli: &Cli,
    flags: &Overrides,
    file: &FileConfig,
    format: Option<Format>,
) -> Result<Outcome, CliError> {
    let spec = spec(cli, None)?;
    let cfg = resolve(flags, file, spec.dim(), 0, DEFAULT_TOL)?;
    let level = cli.global.level.unwrap_or(1);
    let table = coset_table_with_cap(&spec, level, cfg.level_cap)?;
    let by_extension = cfg
        .out
        .as_ref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e == "json");
    let format = format.unwrap_or(if by_extension { Format::Json } else { Format::Csv });
    match format {
        Format::Csv => Ok(Outcome {
            text: table.to_csv(),
            pass: true,
        }),
        Format::Json => envelope("cosets", true, None, table.to_json()),
    }
}

fn k0(cli: &Cli, flags: &Overrides, file: &FileConfig, cmd: &K0Command) -> Result<Outcome, CliError> {
    match cmd {
        K0Command::Class(args) => {
            let m = module(args)?;
            let c = class_of_module(&m)?;
            envelope("k0 class", true, None, json!({ "module": m, "class": class_json(&c) }))
        }
        K0Command::Dilate(args) => {
            let spec = spec(cli, None)?;
            let m = module(args)?;
            let out = dilate_class(&spec, &m)?;
            envelope(
                "k0 dilate",
                true,
                None,
                json!({
                    "matrix": spec.matrix(),
                    "input": m,
                    "output": out,
                    "input_class": class_json(&class_of_module(&m)?),
                    "output_class": class_json(&class_of_module(&out)?),
                }),
            )
        }
        K0Command::Levels(args) => {
            let spec = spec(cli, None)?;
            let m = module(args)?;
            let cfg = resolve(flags, file, spec.dim(), 3, DEFAULT_TOL)?;
            let mut pass = true;
            let mut levels = Vec::new();
            for i in 0..cfg.depth {
                let v = pmra_level_class(&spec, &m, i)?;
                let closed = pmra_level_closed_form(&spec, &m, i)?;
                pass &= v == closed;
                levels.push(json!({
                    "level": i,
                    "v": v,
                    "v_class": class_json(&class_of_module(&v)?),
                    "closed_form_agrees": v == closed,
                    "w": wavelet_class(&spec, &m, i)?,
                }));
            }
            envelope(
                "k0 levels",
                pass,
                None,
                json!({ "matrix": spec.matrix(), "module": m, "levels": levels }),
            )
        }
        K0Command::Sl3Embed { q, c1, c2, c3 } => sl3_embed(*q, [*c1, *c2, *c3]),
    }
}

fn sl3_embed(q: i64, c: [i64; 3]) -> Result<Outcome, CliError> {
    let a = gcd3(c[0], c[1], c[2]);
    if a == 0 {
        return Err(CliError::Usage("cofactors must not all vanish".into()));
    }
    let (x, y, z) = (c[0] / a, c[1] / a, c[2] / a);
    let completion = sl3_with_cofactors(x, y, z)?;
    let m = ModuleDescriptor::with_conjugator(q, vec![0, a], completion.b.clone())?;
    let class = class_of_module(&m)?;
    let expected = KClass::new(
        ExtElement::scalar(3, q)
            .add(&ExtElement::monomial(3, &[1, 2], c[0])?)?
            .add(&ExtElement::monomial(3, &[1, 3], c[1])?)?
            .add(&ExtElement::monomial(3, &[2, 3], c[2])?)?,
    )?;
    let det = completion.b.det()?;
    let cofactors_ok = completion.cofactors() == (x, y, z);
    let pass = det == 1 && cofactors_ok && class == expected;
    envelope(
        "k0 sl3-embed",
        pass,
        None,
        json!({
            "q": q,
            "cofactors": c,
            "a": a,
            "primitive": [x, y, z],
            "completion": completion,
            "det": det,
            "cofactors_verified": cofactors_ok,
            "module": m,
            "class": class_json(&class),
            "expected_class": class_json(&expected),
        }),
    )
}

fn verify(
    cli: &Cli,
    flags: &Overrides,
    file: &FileConfig,
    cmd: &VerifyCommand,
) -> Result<Outcome, CliError> {
    match cmd {
        VerifyCommand::Filters => {
            let spec = spec(cli, Some("[[2]]"))?;
            let factors = diagonal_factors(&spec)?;
            let cfg = resolve(flags, file, 1, 0, DEFAULT_TOL)?;
            let reports = factors
                .iter()
                .map(|&d| verify_filter_bank(&haar_filter_bank(d, None)?, cfg.grid, cfg.tol))
                .collect::<Result<Vec<_>, _>>()?;
            let pass = reports.iter().all(|r| r.pass);
            envelope("verify filters", pass, Some(&cfg), json!({ "banks": reports }))
        }
        VerifyCommand::Phi => {
            let spec = spec(cli, Some("[[2]]"))?;
            let factors = diagonal_factors(&spec)?;
            let n = spec.dim();
            let cfg = resolve(flags, file, n, 20, 1e-6)?;
            let banks = factors
                .iter()
                .map(|&d| haar_filter_bank(d, None))
                .collect::<Result<Vec<_>, _>>()?;
            let product = Section::truncated_product(
                tensor_filter(&banks)?,
                cfg.depth,
                spec.matrix().clone(),
            );
            product.validate()?;
            let closed = haar_tensor(&factors);
            let grid = BoxGrid::cube(n, BOX_HALF_WIDTH, cfg.grid)?;
            let max_error = grid
                .points()
                .iter()
                .map(|x| (product.eval(x) - closed.eval(x)).norm())
                .fold(0.0, f64::max);
            let pass = max_error < cfg.tol;
            envelope(
                "verify phi",
                pass,
                Some(&cfg),
                json!({
                    "factors": factors,
                    "box_half_width": BOX_HALF_WIDTH,
                    "grid_points": grid.len(),
                    "max_error": max_error,
                }),
            )
        }
        VerifyCommand::Xi(args) => {
            let spec = spec(cli, Some("[[2]]"))?;
            let s = match &args.section {
                Some(t) => section_arg(t)?,
                None => haar_tensor(&diagonal_factors(&spec)?),
            };
            let cfg = resolve(flags, file, s.dim(), 0, DEFAULT_TOL)?;
            let grid = TorusGrid::new(s.dim(), cfg.grid)?;
            let rep = xi_membership(&s, &grid, cfg.radius, cfg.tol)?;
            envelope("verify xi", rep.pass, Some(&cfg), rep)
        }
        VerifyCommand::Refine { section, mask, q } => {
            let spec = spec(cli, Some("[[2]]"))?;
            let n = spec.dim();
            let gamma = match &section.section {
                Some(t) => section_arg(t)?,
                None => haar_tensor(&diagonal_factors(&spec)?),
            };
            let mask = match mask {
                Some(t) => section_arg(t)?,
                None => {
                    let banks = diagonal_factors(&spec)?
                        .iter()
                        .map(|&d| haar_filter_bank(d, None))
                        .collect::<Result<Vec<_>, _>>()?;
                    Section::trig(tensor_filter(&banks)?)
                }
            };
            let cfg = resolve(flags, file, n, 0, DEFAULT_TOL)?;
            let boxg = BoxGrid::cube(n, BOX_HALF_WIDTH, cfg.grid)?;
            let refinement = check_refinement(&gamma, &mask, &spec, &boxg, cfg.tol)?;
            let torus = TorusGrid::new(n, cfg.grid)?;
            let unit = check_unit_lattice_norm(&gamma, *q, &torus, cfg.radius, cfg.tol)?;
            let pass = refinement.pass && unit.pass;
            envelope(
                "verify refine",
                pass,
                Some(&cfg),
                json!({ "refinement": refinement, "unit_norm": unit }),
            )
        }
        VerifyCommand::Frame { manifest, samples } => {
            let spec = spec(cli, Some("[[2]]"))?;
            let n = spec.dim();
            let cfg = resolve(flags, file, n, if n == 1 { 2 } else { 1 }, DEFAULT_TOL)?;
            let fs = band_limited_frame(&spec, cfg.depth)?;
            if let Some(path) = manifest {
                std::fs::write(path, canonical_json(&fs.manifest())?)?;
            }
            let grid = TorusGrid::new(n, cfg.grid)?;
            let mut pass = true;
            let mut levels = Vec::new();
            for level in 0..=cfg.depth {
                let corpus = test_corpus(&fs, level, cfg.seed, *samples)?;
                let mut max_residual: f64 = 0.0;
                let mut max_tail: f64 = 0.0;
                let mut ok = true;
                let reports =
                    verify_reconstruction_many(&fs, &corpus, level, &grid, cfg.radius, cfg.tol)?;
                for r in &reports {
                    max_residual = max_residual.max(r.max_residual);
                    max_tail = max_tail.max(r.tail_bound);
                    ok &= r.pass;
                }
                pass &= ok;
                levels.push(json!({
                    "level": level,
                    "elements": fs.level_elements(level)?.len(),
                    "sections": corpus.len(),
                    "max_residual": max_residual,
                    "tail_bound": max_tail,
                    "pass": ok,
                }));
            }
            envelope(
                "verify frame",
                pass,
                Some(&cfg),
                json!({ "matrix": spec.matrix(), "element_count": fs.len(), "levels": levels }),
            )
        }
        VerifyCommand::Gram => {
            let spec = spec(cli, Some("[[2]]"))?;
            let n = spec.dim();
            let level = cli.global.level.unwrap_or(1);
            let cfg = resolve(flags, file, n, level, DEFAULT_TOL)?;
            let fs = band_limited_frame(&spec, level)?;
            let grid = TorusGrid::new(n, cfg.grid)?;
            let rep = gram_report(&fs, level, &grid, cfg.radius)?;
            let expected_rank = fs.wavelets.len() * (spec.absdet() as usize).pow(level);
            let pass = rep.certifies(cfg.tol) && rep.rank == expected_rank;
            envelope(
                "verify gram",
                pass,
                Some(&cfg),
                json!({ "expected_rank": expected_rank, "gram": rep }),
            )
        }
    }
}

fn band_limited_frame(spec: &DilationSpec, depth: u32) -> Result<FrameSet, CliError> {
    if !spec.is_scalar() || spec.matrix().get(0, 0) != 2 {
        return Err(CliError::Usage(
            "band-limited generators are defined for A = 2I".into(),
        ));
    }
    let (phis, psis) = band_limited_generators(spec.dim())?;
    Ok(generate_frame(spec, phis, psis, depth)?)
}
