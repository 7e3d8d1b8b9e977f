use std::fs;
use std::io::Write;
use std::path::Path;

use fdd2d_core::optimizer::{expected_throughputs, MIN_ASYMMETRIC_STEP};
use fdd2d_core::{
    brute_force_asymmetric, brute_force_optimum, derive_params, dominance_threshold, dominant_mode,
    global_optimum, mixed_fd_optimum, mixed_hd_optimum, mixed_hybrid_optimum, nash_equilibrium,
    pair_throughput, payoff_matrix, success_probability, DerivedParams, MixedStrategy,
    PolicySolution, Scenario, SimEstimate, Simulator, TransmissionMode,
};

use crate::args::{
    AnalyzeArgs, Cli, Command, GameArgs, OptimizeArgs, PresetArg, SimulateArgs, SweepArgs, VarArg,
};
use crate::config::load_scenario;
use crate::error::{CliError, Result};
use crate::sweep::{preset, Preset, SweepSpec, SweepVar};
use crate::table::{parse_list, Table};

/// `lambda` and `mu` may differ by this much and still count as symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Width of the simulation acceptance band in standard errors.
pub const SIGMA_BAND: f64 = 3.0;

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::Game(a) => game(a, out),
        Command::Optimize(a) => optimize(a, out),
        Command::Simulate(a) => simulate(a, out, err),
        Command::Sweep(a) => sweep(a, out),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let s = load_scenario(&args.scenario)?;
    let p = derive_params(&s);
    writeln!(
        out,
        "sir_threshold={:.6} path_loss_exp={:.6} separation_m={:.6}",
        s.sir_threshold, s.path_loss_exp, s.separation
    )?;
    for i in 0..2 {
        let n = i + 1;
        let pair = s.pair(i);
        let (lambda, mu) = p.pair(i);
        let tau = if i == 0 { p.tau1 } else { p.tau2 };
        let beta_star = dominance_threshold(s.sir_threshold, pair.intra_distance, s.path_loss_exp);
        let dom = dominant_mode(lambda);
        writeln!(
            out,
            "lambda{n}={lambda:.6} mu{n}={mu:.6} tau{n}={tau:.6} beta{n}={:.6} beta_star{n}={beta_star:.6} dominant{n}={}{}",
            pair.si_attenuation,
            dom.mode,
            if dom.boundary { " BOUNDARY" } else { "" },
        )?;
    }

    let matrix = payoff_matrix(&p);
    writeln!(
        out,
        "payoff matrix (rho1, rho2), rows pair 1, columns pair 2:"
    )?;
    write!(out, "{:>6}", "")?;
    for m in TransmissionMode::ALL {
        write!(out, "  {:<20}", m.label())?;
    }
    writeln!(out)?;
    let mut csv = Table::new(&["mode1", "mode2", "rho1", "rho2"]);
    for m1 in TransmissionMode::ALL {
        write!(out, "{:>6}", m1.label())?;
        for m2 in TransmissionMode::ALL {
            let (r1, r2) = matrix.get(m1, m2);
            write!(out, "  {:<20}", format!("({r1:.6}, {r2:.6})"))?;
            csv.push(vec![
                m1.label().into(),
                m2.label().into(),
                r1.into(),
                r2.into(),
            ]);
        }
        writeln!(out)?;
    }
    if let Some(path) = &args.out {
        write_file(path, &csv.to_csv())?;
    }
    Ok(())
}

fn game_params(args: &GameArgs) -> Result<DerivedParams> {
    if let Some(path) = &args.scenario {
        return Ok(derive_params(&load_scenario(path)?));
    }
    match (args.lambda1, args.lambda2) {
        (Some(l1), Some(l2)) => Ok(DerivedParams::from_abstract(
            l1,
            l2,
            args.mu1.unwrap_or(1.0),
            args.mu2.unwrap_or(1.0),
        )?),
        _ => Err(CliError::Usage(
            "game needs a scenario file or --lambda1 and --lambda2".into(),
        )),
    }
}

fn game(args: &GameArgs, out: &mut dyn Write) -> Result<()> {
    let p = game_params(args)?;
    for i in 0..2 {
        let (lambda, mu) = p.pair(i);
        let dom = dominant_mode(lambda);
        writeln!(
            out,
            "pair {}: lambda={lambda:.6} mu={mu:.6} dominant={}{}",
            i + 1,
            dom.mode,
            if dom.boundary { " (HD and FD tie)" } else { "" }
        )?;
    }
    let ne = nash_equilibrium(&p);
    writeln!(out, "equilibrium: ({}, {})", ne.mode1, ne.mode2)?;
    writeln!(out, "payoffs: rho1={:.6} rho2={:.6}", ne.rho1, ne.rho2)?;
    writeln!(out, "region: {}", ne.region)?;
    let flag = if ne.boundary { " BOUNDARY" } else { "" };
    writeln!(out, "NE={},{}{flag}", ne.mode1, ne.mode2)?;
    Ok(())
}

fn print_solution(out: &mut dyn Write, name: &str, sol: &PolicySolution) -> Result<()> {
    writeln!(
        out,
        "{name:<13} family={:<12} p={} rho={}",
        sol.family.label(),
        sol.strategy,
        sol.rho
    )?;
    Ok(())
}

fn optimize(args: &OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    let params = match (&args.scenario, args.lambda, args.mu) {
        (Some(path), _, _) => derive_params(&load_scenario(path)?),
        (None, Some(l), Some(m)) => DerivedParams::symmetric(l, m)?,
        _ => {
            return Err(CliError::Usage(
                "optimize needs --lambda and --mu or --scenario".into(),
            ))
        }
    };
    if !params.is_symmetric(SYMMETRY_TOLERANCE) {
        if !args.experimental {
            return Err(CliError::Usage(format!(
                "the closed-form optimum assumes both pairs share lambda and mu, \
                 but lambda=({}, {}) mu=({}, {}); pass --experimental for a lattice \
                 search over both strategies",
                params.lambda1, params.lambda2, params.mu1, params.mu2
            )));
        }
        return optimize_asymmetric(&params, args.oracle.unwrap_or(MIN_ASYMMETRIC_STEP), out);
    }

    let (lambda, mu) = (params.lambda1, params.mu1);
    writeln!(out, "lambda={lambda} mu={mu}")?;
    print_solution(out, "mixed-HD", &mixed_hd_optimum(mu))?;
    print_solution(out, "mixed-FD", &mixed_fd_optimum(lambda, mu))?;
    print_solution(out, "mixed-hybrid", &mixed_hybrid_optimum(lambda, mu))?;
    let best = global_optimum(lambda, mu);
    writeln!(
        out,
        "global        family={:<12} edge={} p={} rho={}",
        best.family.label(),
        best.boundary.family().label(),
        best.strategy,
        best.rho
    )?;

    if let Some(step) = args.oracle {
        let (strategy, rho) = brute_force_optimum(lambda, mu, step)?;
        let gap = (best.rho - rho).abs();
        writeln!(
            out,
            "oracle        step={step} p={strategy} rho={rho} gap={gap:e}"
        )?;
        if args.strict && gap > step {
            return Err(CliError::Consistency(format!(
                "oracle gap {gap:e} exceeds the lattice step {step}"
            )));
        }
    }
    Ok(())
}

fn optimize_asymmetric(params: &DerivedParams, step: f64, out: &mut dyn Write) -> Result<()> {
    let sol = brute_force_asymmetric(params, step)?;
    writeln!(
        out,
        "experimental asymmetric search (sum throughput, step={step})\n\
         lambda1={} mu1={} lambda2={} mu2={}",
        params.lambda1, params.mu1, params.lambda2, params.mu2
    )?;
    writeln!(out, "pair 1 p={} rho={}", sol.strategy1, sol.rho1)?;
    writeln!(out, "pair 2 p={} rho={}", sol.strategy2, sol.rho2)?;
    writeln!(out, "total rho={}", sol.total())?;
    Ok(())
}

fn parse_modes(text: &str) -> Result<(TransmissionMode, TransmissionMode)> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b] = parts[..] else {
        return Err(CliError::Usage(format!(
            "--modes expects two modes like HD,FD, got `{text}`"
        )));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<TransmissionMode>()
            .map_err(CliError::Usage)
    };
    Ok((parse(a)?, parse(b)?))
}

fn parse_strategy(flag: &str, text: &str) -> Result<MixedStrategy> {
    let values = parse_list(text).map_err(|e| CliError::Usage(format!("{flag}: {e}")))?;
    let [p0, p1, p2] = values[..] else {
        return Err(CliError::Usage(format!(
            "{flag} expects p_idle,p_hd,p_fd, got `{text}`"
        )));
    };
    Ok(MixedStrategy::new(p0, p1, p2)?)
}

fn estimand_row(t: &mut Table, name: &str, analytic: f64, est: &SimEstimate) -> bool {
    let pass = est.within_sigmas(analytic, SIGMA_BAND);
    t.push(vec![
        name.into(),
        analytic.into(),
        est.mean.into(),
        est.half_width_95.into(),
        if pass { "true" } else { "false" }.into(),
    ]);
    pass
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let scenario: Scenario = load_scenario(&args.scenario)?;
    let params = derive_params(&scenario);
    let sim = Simulator::new(scenario)?;
    let mut t = Table::new(&["estimand", "analytic", "empirical", "ci_half_width", "pass"]);
    let mut passes = Vec::new();

    match (&args.modes, &args.strategy1, &args.strategy2) {
        (Some(modes), _, _) => {
            let (m1, m2) = parse_modes(modes)?;
            let est = sim.estimate(m1, m2, args.slots, args.seed)?;
            let profile = [(m1, m2), (m2, m1)];
            for (i, &(own, other)) in profile.iter().enumerate() {
                let (lambda, mu) = params.pair(i);
                let ps = success_probability(own, other.packets_sent(), lambda, mu)?;
                passes.push(estimand_row(
                    &mut t,
                    &format!("pair{}_success", i + 1),
                    ps,
                    &est.success[i],
                ));
            }
            for (i, &(own, other)) in profile.iter().enumerate() {
                let (lambda, mu) = params.pair(i);
                let rho = pair_throughput(own, other, lambda, mu);
                passes.push(estimand_row(
                    &mut t,
                    &format!("pair{}_throughput", i + 1),
                    rho,
                    &est.throughput[i],
                ));
            }
        }
        (None, Some(a), Some(b)) => {
            let s1 = parse_strategy("--strategy1", a)?;
            let s2 = parse_strategy("--strategy2", b)?;
            let est = sim.estimate_mixed(&s1, &s2, args.slots, args.seed)?;
            let (r1, r2) = expected_throughputs(&params, &s1, &s2);
            passes.push(estimand_row(&mut t, "pair1_throughput", r1, &est[0]));
            passes.push(estimand_row(&mut t, "pair2_throughput", r2, &est[1]));
        }
        _ => {
            return Err(CliError::Usage(
                "simulate needs --modes or --strategy1 and --strategy2".into(),
            ))
        }
    }

    let csv = t.to_csv();
    let passed = passes.iter().filter(|&&p| p).count();
    let summary = format!(
        "{SIGMA_BAND}-sigma check: {passed}/{} estimands pass (slots={} seed={})",
        passes.len(),
        args.slots,
        args.seed
    );
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(csv.as_bytes())?;
            writeln!(err, "{summary}")?;
        }
    }
    if args.strict && passed < passes.len() {
        return Err(CliError::Consistency(summary));
    }
    Ok(())
}

fn custom_spec(args: &SweepArgs) -> Result<SweepSpec> {
    let missing = |flag: &str| CliError::Usage(format!("custom sweep needs {flag}"));
    let var = match args.var.ok_or_else(|| missing("--var"))? {
        VarArg::Mu => SweepVar::Mu,
        VarArg::Lambda => SweepVar::Lambda,
        VarArg::BetaDb => SweepVar::BetaDb,
        VarArg::D => SweepVar::Separation,
    };
    let scenario = args.scenario.as_deref().map(load_scenario).transpose()?;
    Ok(SweepSpec {
        var,
        lo: args.lo.ok_or_else(|| missing("--lo"))?,
        hi: args.hi.ok_or_else(|| missing("--hi"))?,
        step: args.step.ok_or_else(|| missing("--step"))?,
        lambda: args.lambda,
        mu: args.mu,
        scenario,
    })
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let table = match args.preset {
        PresetArg::Fig3 => preset(Preset::Fig3),
        PresetArg::Fig4 => preset(Preset::Fig4),
        PresetArg::Fig5 => preset(Preset::Fig5),
        PresetArg::Fig6 => preset(Preset::Fig6),
        PresetArg::Fig7 => preset(Preset::Fig7),
        PresetArg::Custom => custom_spec(args)?.run()?,
    };
    let csv = table.to_csv();
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            writeln!(
                out,
                "wrote {} rows to {}",
                table.rows().len(),
                path.display()
            )?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

/// Reads a CSV written by this tool back into columns of numbers; text
/// and empty cells become `None`.
pub fn read_numeric_csv(text: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|h| h.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok()).collect())
        .collect();
    (header, rows)
}
