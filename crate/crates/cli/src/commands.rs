use std::fs;
use std::io::Write;

use num_complex::Complex64;
use serde_json::json;
use wright_core::expansions::{expand, relative_error, ExpansionResult, TruncationPolicy};
use wright_core::oracle::{w_scaled, PrecisionConfig};
use wright_core::saddles::{
    classify_minus, complex_saddle_chain, count_contributory_pairs, solve_real_saddle, trace_descent_path, Branch,
    Phase, Saddle,
};
use wright_core::{EvalResult, ScaledArgs, Sign};

use crate::args::{Cli, Command, EvalArgs, ExpandArgs, SaddlesArgs, TableArgs};
use crate::output::{sci, Csv};
use crate::tables::{generate, Status, TableOptions};
use crate::{CliError, CliResult};

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Eval(a) => eval(&a, out),
        Command::Expand(a) => expand_cmd(&a, out),
        Command::Saddles(a) => saddles(&a, out),
        Command::Table(a) => table(&a, out, err),
    }
}

fn scaled(lambda: f64, a: f64, x: f64, sign: Sign) -> CliResult<ScaledArgs> {
    Ok(ScaledArgs::new(lambda, a, x, sign)?)
}

fn eval_json(args: &ScaledArgs, digits: u32, r: &EvalResult) -> serde_json::Value {
    json!({
        "sign": args.sign().to_string(),
        "lambda": args.lambda(),
        "a": args.a(),
        "x": args.x(),
        "nu": args.nu(),
        "precision": digits,
        "value": r.value,
        "value_digits": r.exact.to_sci_string(digits.min(40) as usize),
        "terms": r.truncation_index + 1,
        "last_term": r.last_term_magnitude,
        "surviving_digits": r.surviving_digits,
    })
}

pub fn eval(a: &EvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let args = scaled(a.point.lambda, a.point.a, a.x, a.point.sign.into())?;
    let prec = PrecisionConfig::with_digits(a.precision)?;
    let r = w_scaled(args, prec)?;
    if a.json {
        writeln!(out, "{}", eval_json(&args, a.precision, &r))?;
        return Ok(());
    }
    writeln!(out, "W{}  lambda={} a={} x={} nu={}", args.sign(), args.lambda(), args.a(), args.x(), args.nu())?;
    writeln!(out, "value             {}", sci(r.value))?;
    writeln!(out, "digits            {}", r.exact.to_sci_string(30))?;
    writeln!(out, "terms             {}", r.truncation_index + 1)?;
    writeln!(out, "last term         {}", sci(r.last_term_magnitude))?;
    writeln!(out, "surviving digits  {:.1}", r.surviving_digits)?;
    Ok(())
}

fn policy(a: &ExpandArgs) -> TruncationPolicy {
    match a.order {
        Some(k) => TruncationPolicy::Fixed(k),
        None => TruncationPolicy::Optimal,
    }
}

fn policy_name(p: TruncationPolicy) -> String {
    match p {
        TruncationPolicy::Fixed(k) => format!("fixed({k})"),
        TruncationPolicy::Optimal => "optimal".to_string(),
    }
}

fn expansion_json(r: &ExpansionResult, oracle: &Result<EvalResult, String>) -> serde_json::Value {
    let components: Vec<_> = r
        .components
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "saddle": [c.saddle.location.re, c.saddle.location.im],
                "exponent": c.exponent,
                "value": c.value,
                "truncation_index": c.truncation_index,
                "included": c.included,
            })
        })
        .collect();
    let mut v = json!({
        "method": r.method.to_string(),
        "value": r.value,
        "truncation": policy_name(r.truncation_mode),
        "truncation_index": r.truncation_index,
        "exponent": r.exponent,
        "n_pairs": r.n_pairs,
        "error_proxy": r.error_proxy(),
        "term_magnitudes": r.terms.iter().map(|t| t.norm()).collect::<Vec<_>>(),
        "components": components,
    });
    match oracle {
        Ok(w) => {
            v["oracle"] = json!(w.value);
            v["relative_error"] = json!(relative_error(w, r));
        }
        Err(e) => v["oracle_error"] = json!(e),
    }
    v
}

pub fn expand_cmd(a: &ExpandArgs, out: &mut dyn Write) -> CliResult<()> {
    let args = scaled(a.point.lambda, a.point.a, a.x, a.point.sign.into())?;
    let prec = PrecisionConfig::with_digits(a.precision)?;
    let r = expand(args, policy(a), a.include_subdominant)?;
    let oracle = w_scaled(args, prec).map_err(|e| e.to_string());
    if a.json {
        writeln!(out, "{}", expansion_json(&r, &oracle))?;
        return Ok(());
    }
    writeln!(out, "W{}  lambda={} a={} x={}", args.sign(), args.lambda(), args.a(), args.x())?;
    writeln!(out, "method            {}", r.method)?;
    writeln!(out, "value             {}", sci(r.value))?;
    match &oracle {
        Ok(w) => {
            writeln!(out, "oracle            {}", sci(w.value))?;
            writeln!(out, "relative error    {}", sci(relative_error(w, &r)))?;
        }
        Err(e) => writeln!(out, "oracle            unavailable: {e}")?,
    }
    writeln!(out, "truncation        {} at k={}", policy_name(r.truncation_mode), r.truncation_index)?;
    if let Some(p) = r.error_proxy() {
        writeln!(out, "error proxy       {}", sci(p))?;
    }
    writeln!(out, "exponent          {:.9}", r.exponent)?;
    if args.sign() == Sign::Plus {
        writeln!(out, "pairs N           {}", r.n_pairs)?;
    }
    writeln!(out, "components")?;
    for c in &r.components {
        writeln!(
            out,
            "  I_{:<2} u={:+.8}{:+.8}i  exponent={:+.6}  value={}  k={}{}",
            c.index,
            c.saddle.location.re,
            c.saddle.location.im,
            c.exponent,
            sci(c.value),
            c.truncation_index,
            if c.included { "" } else { "  (subdominant, omitted)" }
        )?;
    }
    writeln!(out, "terms |t_k|")?;
    for (k, t) in r.terms.iter().enumerate() {
        let mark = if k == r.truncation_index { " <" } else { "" };
        writeln!(out, "  {k:>3}  {}{mark}", sci(t.norm()))?;
    }
    Ok(())
}

fn saddle_json(s: &Saddle) -> serde_json::Value {
    json!({
        "index": s.index,
        "kind": format!("{:?}", s.kind),
        "u": [s.location.re, s.location.im],
        "h": [s.phase_value.re, s.phase_value.im],
        "h2": [s.second_derivative.re, s.second_derivative.im],
    })
}

fn saddle_line(s: &Saddle) -> String {
    format!(
        "u={:+.8}{:+.8}i  h={:+.8}{:+.8}i  h''={:+.8}{:+.8}i  {:?}",
        s.location.re,
        s.location.im,
        s.phase_value.re,
        s.phase_value.im,
        s.second_derivative.re,
        s.second_derivative.im,
        s.kind
    )
}

/// Descent-path samples from each saddle in `from`, both branches.
fn trace_csv(phase: &Phase, from: &[Saddle], targets: &[Saddle]) -> CliResult<Csv> {
    let mut csv = Csv::new(&["saddle", "branch", "re_u", "im_u", "re_h", "im_h"]);
    csv.meta("sign", phase.sign);
    csv.meta("lambda", phase.lambda);
    csv.meta("a", phase.a);
    csv.meta("version", crate::VERSION);
    for s in from {
        for (name, branch) in [("upper", Branch::Upper), ("lower", Branch::Lower)] {
            let path = trace_descent_path(phase, s, branch, targets)?;
            csv.meta(&format!("path {} {name}", s.index), format!("{:?}", path.terminus));
            for u in &path.samples {
                let h: Complex64 = phase.h(*u);
                csv.push(vec![s.index.into(), name.into(), u.re.into(), u.im.into(), h.re.into(), h.im.into()]);
            }
        }
    }
    Ok(csv)
}

pub fn saddles(a: &SaddlesArgs, out: &mut dyn Write) -> CliResult<()> {
    let (l, av) = (a.point.lambda, a.point.a);
    let sign: Sign = a.point.sign.into();
    let phase = Phase::new(l, av, sign)?;
    let mut report = json!({ "sign": sign.to_string(), "lambda": l, "a": av });
    let mut text = String::new();
    let traced: Vec<Saddle>;
    match sign {
        Sign::Minus => {
            let class = classify_minus(l, av)?;
            text.push_str(&format!("regime            {:?}\n", class.regime));
            report["regime"] = json!(format!("{:?}", class.regime));
            if let Ok(real) = solve_real_saddle(&phase) {
                for s in &real {
                    text.push_str(&format!("real saddle       {}\n", saddle_line(s)));
                }
                report["real_saddles"] = json!(real.iter().map(saddle_json).collect::<Vec<_>>());
            }
            for s in &class.contributory {
                text.push_str(&format!("contributory      {}\n", saddle_line(s)));
            }
            report["contributory"] = json!(class.contributory.iter().map(saddle_json).collect::<Vec<_>>());
            traced = class.contributory.clone();
        }
        Sign::Plus => {
            let region = count_contributory_pairs(l, av)?;
            text.push_str(&format!("pairs N           {}\n", region.n_pairs));
            text.push_str(&format!("last subdominant  {}\n", region.last_pair_subdominant));
            for (s, d) in region.saddles.iter().zip(&region.directions) {
                text.push_str(&format!("u_{:<2}              {}  leaves along {:+.6}{:+.6}i\n", s.index, saddle_line(s), d.re, d.im));
            }
            report["n_pairs"] = json!(region.n_pairs);
            report["last_pair_subdominant"] = json!(region.last_pair_subdominant);
            report["contributory"] = json!(region.saddles.iter().map(saddle_json).collect::<Vec<_>>());
            traced = region.saddles.clone();
        }
    }
    if let Some(n) = a.chain {
        if sign != Sign::Plus {
            return Err(CliError::Usage("--chain applies to --sign plus only".into()));
        }
        let chain = complex_saddle_chain(&phase, n)?;
        for s in &chain {
            text.push_str(&format!("chain u_{:<2}        {}\n", s.index, saddle_line(s)));
        }
        report["chain"] = json!(chain.iter().map(saddle_json).collect::<Vec<_>>());
    }
    if a.trace {
        let csv = trace_csv(&phase, &traced, &traced)?;
        match &a.out {
            Some(p) => fs::write(p, csv.render())?,
            None => {
                out.write_all(csv.render().as_bytes())?;
                return Ok(());
            }
        }
    }
    if a.json {
        writeln!(out, "{report}")?;
    } else {
        write!(out, "{text}")?;
    }
    Ok(())
}

pub fn table(a: &TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let opts = TableOptions { x: a.x, order: a.order, precision: a.precision };
    let report = generate(a.table, opts)?;
    let body = if a.json { format!("{}\n", report.to_json()) } else { report.csv.render() };
    match &a.out {
        Some(p) => {
            fs::write(p, body)?;
            write!(out, "{}", report.summary())?;
        }
        None => {
            out.write_all(body.as_bytes())?;
            write!(err, "{}", report.summary())?;
        }
    }
    match report.count(Status::Mismatch) {
        0 => Ok(()),
        n => Err(CliError::Mismatch(n)),
    }
}
