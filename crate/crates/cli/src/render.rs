//! Aligned text renderings of reports.

use std::fmt::Write as _;

use copula_gof::experiments::AseFit;
use copula_gof::gof::TestReport;

use crate::TauFit;

pub fn test_report(r: &TestReport) -> String {
    let mut out = String::new();
    match r.h0_family {
        Some(f) => {
            let _ = writeln!(out, "H0 family:  {f}");
        }
        None => {
            let _ = writeln!(out, "two-sample comparison");
        }
    }
    let _ = writeln!(out, "decision:   {:?}", r.decision);
    let _ = writeln!(
        out,
        "n = {} (n1 = {}, n2 = {}), levels from {:?}",
        r.n, r.n1, r.n2, r.level_source
    );
    if let (Some(tau), Some(fit)) = (r.tau_hat, r.fitted) {
        let _ = writeln!(out, "tau_hat = {tau:.4}, bootstrap null {fit}");
    }
    let _ = writeln!(
        out,
        "{:>3} {:>14} {:>14} {:>7}  closest grid copula",
        "j", "statistic", "threshold", "exceeds"
    );
    for l in &r.per_level {
        let best = l.best_spec.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:>3} {:>14.6e} {:>14.6e} {:>7}  {best}",
            l.j.get(),
            l.statistic,
            l.threshold,
            if l.exceeds { "yes" } else { "no" }
        );
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn tau_fits(fits: &[TauFit]) -> String {
    let mut out = String::new();
    if let Some(first) = fits.first() {
        let _ = writeln!(out, "sample Kendall tau = {:.4}", first.tau_hat);
    }
    for f in fits {
        let value = match (&f.parameter, &f.error) {
            (Some(p), _) => format!("{p:.4}"),
            (None, Some(e)) => format!("n/a ({e})"),
            (None, None) => "n/a".into(),
        };
        let _ = writeln!(out, "{:<14}{value}", f.family.to_string());
    }
    out
}

pub fn ase_fits(fits: &[AseFit]) -> String {
    let mut out = String::new();
    if let Some(first) = fits.first() {
        let _ = writeln!(
            out,
            "benchmark: linear Haar projection estimate at level {}",
            first.j.get()
        );
    }
    let _ = writeln!(
        out,
        "{:<14}{:>12}{:>14}{:>14}",
        "family", "parameter", "ASE", "relative ASE"
    );
    for f in fits {
        let _ = writeln!(
            out,
            "{:<14}{:>12.4}{:>14.6e}{:>14.6}",
            f.spec.family().to_string(),
            f.spec.parameter(),
            f.ase,
            f.relative_ase
        );
    }
    out
}
