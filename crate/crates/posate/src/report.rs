//! Deterministic, line-oriented rendering of check reports, refutation
//! reports, and certification outcomes. Identical inputs always produce
//! byte-identical text, so reports diff cleanly.

use crate::checkers::{CheckReport, Counterexample, Verdict};
use crate::cone::{Certificate, CertifyOutcome};
use crate::poly::Rat;
use crate::witness::{Justification, RefutationReport, Witness};

fn render_direction(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn render_counterexample(c: &Counterexample) -> String {
    let mut s = format!("counterexample: condition={} point={}", c.condition, c.point);
    if let Some(v) = &c.direction {
        s.push_str(&format!(" direction={}", render_direction(v)));
    }
    s.push_str(&format!(" value={}", c.value));
    s
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::VerifiedOnSamples => "verified-on-samples",
        Verdict::Violated(_) => "violated",
        Verdict::Inconclusive(_) => "inconclusive",
    }
}

pub fn render_check_report(r: &CheckReport) -> String {
    let mut out = format!("outcome: {}\n", verdict_word(&r.verdict));
    match &r.verdict {
        Verdict::Violated(c) => out.push_str(&format!("{}\n", render_counterexample(c))),
        Verdict::Inconclusive(reason) => out.push_str(&format!("reason: {reason}\n")),
        Verdict::VerifiedOnSamples => {}
    }
    for sub in &r.sub_reports {
        out.push_str(&format!(
            "condition {}: {}\n",
            sub.condition,
            verdict_word(&sub.verdict)
        ));
        match &sub.verdict {
            Verdict::Violated(c) => {
                out.push_str(&format!("  {}\n", render_counterexample(c)))
            }
            Verdict::Inconclusive(reason) => out.push_str(&format!("  reason: {reason}\n")),
            Verdict::VerifiedOnSamples => {}
        }
    }
    out
}

fn render_witness(w: &Witness) -> String {
    match w {
        Witness::TypeI { point, value } => {
            format!("witness: negative-value point={point} value={value}")
        }
        Witness::FirstOrder {
            point,
            direction,
            derivative,
        } => format!(
            "witness: first-order point={point} direction={} derivative={derivative}",
            render_direction(direction)
        ),
        Witness::SecondOrder {
            point,
            direction,
            form_value,
        } => format!(
            "witness: second-order point={point} direction={} form-value={form_value}",
            render_direction(direction)
        ),
        Witness::Quotient {
            generator_index,
            point,
            value,
        } => format!(
            "witness: quotient generator={generator_index} point={point} value={value}"
        ),
    }
}

pub fn render_refutation(r: &RefutationReport) -> String {
    let mut out = String::from("outcome: refuted\n");
    out.push_str(&format!("{}\n", render_witness(&r.witness)));
    out.push_str(&format!(
        "justification: {}\n",
        match r.justification {
            Justification::Unconditional => "unconditional",
            Justification::ConditionalOnQuotientHypotheses => "conditional-on-quotient-hypotheses",
        }
    ));
    if let (Some(radius), Some(point)) = (&r.negativity_radius, &r.negative_point) {
        out.push_str(&format!("negative-point: {point}\n"));
        out.push_str(&format!("negativity-radius: {radius}\n"));
    }
    out
}

pub fn render_certified(degree: u32, cert: &Certificate, cert_path: &str) -> String {
    format!(
        "outcome: certified\ndegree: {degree}\nterms: {}\ncertificate: {cert_path}\n",
        cert.terms.len()
    )
}

pub fn render_not_found(outcome: &CertifyOutcome) -> String {
    match outcome {
        CertifyOutcome::Certified { .. } => unreachable!("not-found renderer on a certificate"),
        CertifyOutcome::NotFound { d_max, attempts } => {
            let mut out = format!("outcome: not-found\nmax-degree: {d_max}\n");
            for a in attempts {
                out.push_str(&format!(
                    "infeasible-at-degree: {} farkas-components: {}\n",
                    a.degree,
                    a.farkas.y.len()
                ));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::SubReport;
    use crate::poly::{int, rat, Point};

    #[test]
    fn check_report_rendering_is_stable() {
        let report = CheckReport {
            verdict: Verdict::Violated(Counterexample {
                point: Point::new(vec![int(0), rat(3, 4)]),
                direction: Some(vec![int(1), int(0)]),
                value: rat(-1, 2),
                condition: "directional-cone".into(),
            }),
            sub_reports: vec![SubReport {
                condition: "target-in-face-ideal".into(),
                verdict: Verdict::VerifiedOnSamples,
            }],
        };
        let text = render_check_report(&report);
        assert_eq!(
            text,
            "outcome: violated\n\
             counterexample: condition=directional-cone point=(0, 3/4) direction=(1, 0) value=-1/2\n\
             condition target-in-face-ideal: verified-on-samples\n"
        );
        assert_eq!(text, render_check_report(&report));
    }

    #[test]
    fn refutation_rendering_is_stable() {
        let report = RefutationReport {
            witness: Witness::FirstOrder {
                point: Point::new(vec![int(0), int(1)]),
                direction: vec![int(1), int(0)],
                derivative: int(-1),
            },
            negativity_radius: Some(rat(1, 4)),
            negative_point: Some(Point::new(vec![rat(1, 4), int(1)])),
            justification: Justification::Unconditional,
        };
        let text = render_refutation(&report);
        assert!(text.starts_with("outcome: refuted\n"));
        assert!(text.contains("witness: first-order point=(0, 1) direction=(1, 0) derivative=-1"));
        assert!(text.contains("negativity-radius: 1/4"));
        assert_eq!(text, render_refutation(&report));
    }
}
