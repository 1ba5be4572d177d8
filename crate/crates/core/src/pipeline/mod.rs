//! Free-product decomposition certificates for the fibre and the embedding
//! into a free-by-cyclic group `F ⋊_θ ℤ` with `F = A * D`.
//!
//! All checks are rank counts after folding, run to a finite level `N`.

mod rewrite;

use std::fmt;

use crate::certify::{complements, MinimalityReport};
use crate::error::{Error, Result};
use crate::graphs::{subgroup_rank, SubgroupGraph};
use crate::triples::{GraphTriple, Which};
use crate::words::{format_word_list, parse_word_list, Automorphism, Letter, Substitution, Word};

pub use rewrite::{symbol_text, Rewriter};

/// `𝔽 = A * (✱ᵢ ψⁱ(C₀))`, checked to `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub a_basis: Vec<Word>,
    pub c0_basis: Vec<Word>,
    pub psi: Automorphism,
    pub level: usize,
}

impl DecompositionCertificate {
    pub fn new(a_basis: Vec<Word>, c0_basis: Vec<Word>, psi: Automorphism, level: usize) -> DecompositionCertificate {
        DecompositionCertificate { a_basis, c0_basis, psi, level }
    }

    pub fn rank(&self) -> usize {
        self.psi.rank()
    }

    /// `A`, then `ψⁱ(C₀)` for `i = -level..=level`, shift-major.
    pub fn symbols(&self, level: usize) -> Result<Vec<Word>> {
        let mut out = self.a_basis.clone();
        for i in -(level as i64)..=level as i64 {
            out.extend(self.psi.apply_all(&self.c0_basis, i)?);
        }
        Ok(out)
    }

    pub fn symbol_count(&self, level: usize) -> usize {
        self.a_basis.len() + (2 * level + 1) * self.c0_basis.len()
    }

    /// Rank additivity of `Γ(A) ∨ ⋁ Γ(ψⁱC₀)`, `|i| ≤ level`.
    pub fn free_product_at(&self, level: usize) -> Result<bool> {
        let syms = self.symbols(level)?;
        if syms.iter().any(Word::is_empty) {
            return Ok(false);
        }
        Ok(subgroup_rank(self.rank(), &syms)? == self.symbol_count(level))
    }

    /// Whether every word lies in the span of the level-`level` symbols.
    pub fn saturates(&self, words: &[Word], level: usize) -> Result<bool> {
        let g = SubgroupGraph::generated_by(self.rank(), &self.symbols(level)?)?;
        Ok(g.contains_all(words))
    }

    pub fn rewriter(&self, level: usize) -> Result<Rewriter> {
        Rewriter::new(self.rank(), &self.symbols(level)?)
    }

    /// Reads the `A:`, `C0:` and `level:` lines.
    pub fn parse(text: &str, psi: Automorphism) -> Result<DecompositionCertificate> {
        let mut a = None;
        let mut c0 = None;
        let mut level = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Precondition(format!("certificate line without key: {line}")))?;
            let value = value.trim();
            match key.trim() {
                "A" => a = Some(parse_word_list(value)?),
                "C0" => c0 = Some(parse_word_list(value)?),
                "level" => {
                    level = Some(value.parse().map_err(|_| Error::Precondition(format!("bad level: {value}")))?)
                }
                other => return Err(Error::Precondition(format!("unknown certificate key: {other}"))),
            }
        }
        let cert = DecompositionCertificate {
            a_basis: a.unwrap_or_default(),
            c0_basis: c0.unwrap_or_default(),
            psi,
            level: level.ok_or_else(|| Error::Precondition("certificate without level".into()))?,
        };
        for w in cert.a_basis.iter().chain(&cert.c0_basis) {
            w.check_alphabet(cert.rank())?;
        }
        Ok(cert)
    }
}

impl fmt::Display for DecompositionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A: {}", format_word_list(&self.a_basis))?;
        writeln!(f, "C0: {}", format_word_list(&self.c0_basis))?;
        writeln!(f, "level: {}", self.level)
    }
}

/// One candidate tried by [`extract_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateAttempt {
    pub name: &'static str,
    pub a_basis: Vec<Word>,
    pub c0_basis: Vec<Word>,
    pub rank_ok: bool,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub certificate: Option<DecompositionCertificate>,
    pub attempts: Vec<CandidateAttempt>,
}

impl fmt::Display for Extraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.attempts {
            writeln!(
                f,
                "# candidate {}: A=[{}] C0=[{}] rank_check={} saturation={}",
                a.name,
                format_word_list(&a.a_basis),
                format_word_list(&a.c0_basis),
                pass(a.rank_ok),
                pass(a.saturated)
            )?;
        }
        match &self.certificate {
            Some(c) => write!(f, "{c}"),
            None => writeln!(f, "# no candidate verified; supply a certificate by hand"),
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Tries `(A=∅, C₀=E)`, `(A=∅, C₀=C)` and `(A=E, C₀=C)` against the rank
/// check and saturation of `Z#` at `level`.
pub fn extract_certificate(
    t: &GraphTriple,
    psi: &Automorphism,
    report: &MinimalityReport,
    level: usize,
) -> Result<Extraction> {
    if !report.certified() {
        return Err(Error::Uncertified("extraction needs a certified minimal triple".into()));
    }
    let c = complements(t)?;
    let z_basis = t.image_subgroup(Which::Z)?.basis();
    let candidates = [
        ("empty-A/E", Vec::new(), c.e_basis.clone()),
        ("empty-A/C", Vec::new(), c.c_basis.clone()),
        ("E/C", c.e_basis.clone(), c.c_basis.clone()),
    ];
    let mut attempts = Vec::new();
    for (name, a_basis, c0_basis) in candidates {
        let cert = DecompositionCertificate::new(a_basis, c0_basis, psi.clone(), level);
        let rank_ok = cert.free_product_at(level)?;
        let saturated = cert.saturates(&z_basis, level)?;
        attempts.push(CandidateAttempt {
            name,
            a_basis: cert.a_basis.clone(),
            c0_basis: cert.c0_basis.clone(),
            rank_ok,
            saturated,
        });
        if rank_ok && saturated {
            return Ok(Extraction { certificate: Some(cert), attempts });
        }
    }
    Ok(Extraction { certificate: None, attempts })
}

/// The automorphism `φ` of `D` used to build the embedding. Atoroidality
/// is never checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiSpec {
    phi: Automorphism,
}

impl PhiSpec {
    pub fn new(phi: Automorphism) -> Result<PhiSpec> {
        if let Err(defect) = phi.check() {
            return Err(Error::Precondition(format!("phi tables are not inverse: {defect}")));
        }
        Ok(PhiSpec { phi })
    }

    /// `d_k ↦ d_{k+1}`, last generator `↦ d_1 d_2`. For rank 3 this is
    /// `(a↦b, b↦c, c↦ab)`.
    pub fn standard(rank: usize) -> Result<PhiSpec> {
        if rank < 2 {
            return Err(Error::Precondition(format!("no standard phi in rank {rank}")));
        }
        let mut images: Vec<Word> = (1..rank).map(Word::generator).collect();
        images.push(Word::generator(0).concat(&Word::generator(1)));
        let mut inverse = vec![Word::generator(rank - 1).concat(&Word::generator(0).inverse())];
        inverse.extend((0..rank - 1).map(Word::generator));
        PhiSpec::new(Automorphism::new(images, inverse)?)
    }

    /// The default for a certificate with `c0` symbols: rank `max(3, c0)`.
    pub fn default_for(c0: usize) -> Result<PhiSpec> {
        PhiSpec::standard(c0.max(3))
    }

    pub fn rank(&self) -> usize {
        self.phi.rank()
    }

    pub fn phi(&self) -> &Automorphism {
        &self.phi
    }

    pub fn certified_atoroidal(&self) -> bool {
        false
    }
}

/// `F = A * D` with `θ|A = ι∘ψ|A` and `θ|D = φⁿ`; `ι` sends `A` to its own
/// letters and `ψⁱ(c_k)` to `φⁿⁱ(d_kⁿ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub power: usize,
    /// Target letters `0..a_count` are the `A` letters.
    pub a_count: usize,
    /// The remaining `d_rank` target letters are `D`.
    pub d_rank: usize,
    pub theta: Automorphism,
    /// `ι` on the certificate's `A` and `C₀` basis words, in that order.
    pub iota: Vec<(Word, Word)>,
}

fn shift(w: &Word, offset: usize) -> Word {
    Word::from_letters(w.letters().iter().map(|l| Letter::new(l.index() + offset, l.inverse)))
}

fn unshift(w: &Word, offset: usize) -> Word {
    Word::from_letters(w.letters().iter().map(|l| Letter::new(l.index() - offset, l.inverse)))
}

impl Embedding {
    pub fn target_rank(&self) -> usize {
        self.a_count + self.d_rank
    }

    /// `θ|D` as an automorphism of `D`.
    pub fn theta_on_d(&self) -> Result<Automorphism> {
        let a = self.a_count;
        let f = (a..a + self.d_rank).map(|k| unshift(&self.theta.images()[k], a)).collect();
        let b = (a..a + self.d_rank).map(|k| unshift(&self.theta.inverse_images()[k], a)).collect();
        Ok(Automorphism::new(f, b)?)
    }

    /// `θ^i(d_k^n)` for every `D` generator, as target words.
    fn orbit_word(&self, theta_d: &Automorphism, k: usize, i: i64) -> Result<Word> {
        let dn = Word::generator(k).pow(self.power as i64);
        Ok(shift(&theta_d.apply(&dn, i)?, self.a_count))
    }

    /// `ι` on the symbols of `cert` at `level`.
    pub fn symbol_images(&self, cert: &DecompositionCertificate, level: usize) -> Result<Vec<Word>> {
        let mut out: Vec<Word> = (0..cert.a_basis.len()).map(Word::generator).collect();
        if cert.c0_basis.is_empty() {
            return Ok(out);
        }
        let theta_d = self.theta_on_d()?;
        for i in -(level as i64)..=level as i64 {
            for k in 0..cert.c0_basis.len() {
                out.push(self.orbit_word(&theta_d, k, i)?);
            }
        }
        Ok(out)
    }

    /// `ι` on whole fibre words, by rewriting over the level-`level`
    /// symbols.
    pub fn iota_map(&self, cert: &DecompositionCertificate, level: usize) -> Result<IotaMap> {
        Ok(IotaMap {
            rewriter: cert.rewriter(level)?,
            images: Substitution::new(self.symbol_images(cert, level)?),
        })
    }

    pub fn parse(text: &str) -> Result<Embedding> {
        let bad = |m: String| Error::Precondition(m);
        let mut power = None;
        let mut a_count = None;
        let mut d_rank = None;
        let mut iota = Vec::new();
        let mut theta = Vec::new();
        let mut theta_inv = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line.split_once(':').ok_or_else(|| bad(format!("embedding line without key: {line}")))?;
            let value = value.trim();
            let num = |v: &str| v.parse::<usize>().map_err(|_| bad(format!("bad number: {v}")));
            let arrow = |v: &str| -> Result<(Word, Word)> {
                let (l, r) = v.split_once("->").ok_or_else(|| bad(format!("expected `x -> w`: {v}")))?;
                Ok((Word::parse(l.trim())?, Word::parse(r.trim())?))
            };
            match key.trim() {
                "power" => power = Some(num(value)?),
                "a_letters" => a_count = Some(num(value)?),
                "d_rank" => d_rank = Some(num(value)?),
                "iota" => iota.push(arrow(value)?),
                "theta" => theta.push(arrow(value)?),
                "theta_inv" => theta_inv.push(arrow(value)?),
                other => return Err(bad(format!("unknown embedding key: {other}"))),
            }
        }
        let a_count = a_count.ok_or_else(|| bad("missing a_letters".into()))?;
        let d_rank = d_rank.ok_or_else(|| bad("missing d_rank".into()))?;
        let table = |rows: Vec<(Word, Word)>, name: &str| -> Result<Vec<Word>> {
            let mut out = vec![None; a_count + d_rank];
            for (x, img) in rows {
                let slot = match x.letters() {
                    [l] if !l.inverse && l.index() < out.len() => l.index(),
                    _ => return Err(bad(format!("{name}: {x} is not a target generator"))),
                };
                out[slot] = Some(img);
            }
            out.into_iter()
                .enumerate()
                .map(|(k, w)| w.ok_or_else(|| bad(format!("{name}: no image for {}", Letter::positive(k)))))
                .collect()
        };
        Ok(Embedding {
            power: power.ok_or_else(|| bad("missing power".into()))?,
            a_count,
            d_rank,
            theta: Automorphism::new(table(theta, "theta")?, table(theta_inv, "theta_inv")?)?,
            iota,
        })
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "power: {}", self.power)?;
        writeln!(f, "a_letters: {}", self.a_count)?;
        writeln!(f, "d_rank: {}", self.d_rank)?;
        for (x, y) in &self.iota {
            writeln!(f, "iota: {x} -> {y}")?;
        }
        for (k, img) in self.theta.images().iter().enumerate() {
            writeln!(f, "theta: {} -> {img}", Letter::positive(k))?;
        }
        for (k, img) in self.theta.inverse_images().iter().enumerate() {
            writeln!(f, "theta_inv: {} -> {img}", Letter::positive(k))?;
        }
        Ok(())
    }
}

/// `ι` extended to the span of the certificate symbols.
#[derive(Debug, Clone)]
pub struct IotaMap {
    rewriter: Rewriter,
    images: Substitution,
}

impl IotaMap {
    pub fn apply(&self, w: &Word) -> Option<Word> {
        let e = self.rewriter.rewrite(w)?;
        Some(self.images.apply(&e).expect("symbol alphabet"))
    }
}

/// Builds the embedding at power `n`, with `θ|A` rewritten over the
/// certificate symbols at the certificate's level.
pub fn build_embedding(cert: &DecompositionCertificate, phi: &PhiSpec, n: usize) -> Result<Embedding> {
    if n == 0 {
        return Err(Error::Precondition("power must be positive".into()));
    }
    let p = cert.a_basis.len();
    let q = cert.c0_basis.len();
    if p + q == 0 {
        return Err(Error::Precondition("empty certificate".into()));
    }
    let d_rank = if q == 0 { 0 } else { phi.rank() };
    if q > d_rank && q > 0 {
        return Err(Error::Precondition(format!("C0 has {q} words but D has rank {d_rank}")));
    }
    let phi_n = if q == 0 { None } else { Some(phi.phi().power(n as i64)) };
    let mut images = Vec::with_capacity(p + d_rank);
    let mut inverse = Vec::with_capacity(p + d_rank);
    // Placeholder tables so the symbol images can be computed from θ|D.
    let mut emb = Embedding { power: n, a_count: p, d_rank, theta: Automorphism::identity(p + d_rank), iota: Vec::new() };
    if let Some(phi_n) = &phi_n {
        let mut f: Vec<Word> = (0..p).map(Word::generator).collect();
        let mut b = f.clone();
        f.extend(phi_n.images().iter().map(|w| shift(w, p)));
        b.extend(phi_n.inverse_images().iter().map(|w| shift(w, p)));
        emb.theta = Automorphism::new(f, b)?;
    }
    let iota = emb.iota_map(cert, cert.level)?;
    for (j, a) in cert.a_basis.iter().enumerate() {
        let fwd = cert.psi.apply(a, 1)?;
        let back = cert.psi.apply(a, -1)?;
        let missing = |w: &Word| {
            Error::CertificateIncomplete(format!(
                "psi^±1 of A word {j} ({a}) is {w}, not expressible over the symbols at level {}",
                cert.level
            ))
        };
        images.push(iota.apply(&fwd).ok_or_else(|| missing(&fwd))?);
        inverse.push(iota.apply(&back).ok_or_else(|| missing(&back))?);
    }
    for k in p..p + d_rank {
        images.push(emb.theta.images()[k].clone());
        inverse.push(emb.theta.inverse_images()[k].clone());
    }
    emb.theta = Automorphism::new(images, inverse)?;
    let symbol_images = emb.symbol_images(cert, 0)?;
    emb.iota = cert.a_basis.iter().chain(&cert.c0_basis).cloned().zip(symbol_images).collect();
    Ok(emb)
}

/// Pass/fail with an optional witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub passed: bool,
    pub witness: Option<String>,
}

impl Check {
    fn ok() -> Check {
        Check { passed: true, witness: None }
    }

    fn fail(witness: String) -> Check {
        Check { passed: false, witness: Some(witness) }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(pass(self.passed))?;
        if let Some(w) = &self.witness {
            write!(f, " ({w})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub level: usize,
    pub power: usize,
    pub theta_automorphism: Check,
    pub intertwining: Check,
    pub injectivity: Check,
    pub orbit_free: Check,
}

impl EmbeddingReport {
    pub fn all_passed(&self) -> bool {
        self.theta_automorphism.passed && self.intertwining.passed && self.injectivity.passed && self.orbit_free.passed
    }
}

impl fmt::Display for EmbeddingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level: {}", self.level)?;
        writeln!(f, "power: {}", self.power)?;
        writeln!(f, "theta_automorphism: {}", self.theta_automorphism)?;
        writeln!(f, "intertwining: {}", self.intertwining)?;
        writeln!(f, "injectivity: {}", self.injectivity)?;
        writeln!(f, "orbit_free: {}", self.orbit_free)
    }
}

/// Checks, to `level`: (i) `θ(ι(y)) = ι(ψ(y))` for `y = ψⁱ(x)`, `x` a
/// certificate word; (ii) rank additivity of `ι(A)` and `θⁱ(ι(C₀))`;
/// (iii) rank additivity of the `θ|D`-orbit of `{d_kⁿ}`.
pub fn verify_embedding(emb: &Embedding, cert: &DecompositionCertificate, level: usize) -> Result<EmbeddingReport> {
    let psi = &cert.psi;
    let n = level as i64;
    let theta_automorphism = match emb.theta.check() {
        Ok(()) => Check::ok(),
        Err(defect) => Check::fail(defect.to_string()),
    };
    let shape_ok = emb.a_count == cert.a_basis.len() && (cert.c0_basis.is_empty() || cert.c0_basis.len() <= emb.d_rank);
    if !shape_ok {
        let fail = Check::fail(format!(
            "embedding has {} A letters and D rank {}, certificate has |A| = {} and |C0| = {}",
            emb.a_count,
            emb.d_rank,
            cert.a_basis.len(),
            cert.c0_basis.len()
        ));
        return Ok(EmbeddingReport {
            level,
            power: emb.power,
            theta_automorphism,
            intertwining: fail.clone(),
            injectivity: fail.clone(),
            orbit_free: fail,
        });
    }
    let theta_d = if emb.d_rank > 0 { Some(emb.theta_on_d()?) } else { None };

    let intertwining = match cert.rewriter(level) {
        Err(e) => Check::fail(format!("symbols at level {level} are not free: {e}")),
        Ok(rewriter) => {
            let iota = IotaMap { rewriter, images: Substitution::new(emb.symbol_images(cert, level)?) };
            let mut result = Check::ok();
            'outer: for (j, x) in cert.a_basis.iter().chain(&cert.c0_basis).enumerate() {
                let is_c = j >= cert.a_basis.len();
                for i in -n..=n {
                    let y = psi.apply(x, i)?;
                    let Some(iy) = iota.apply(&y) else {
                        result = Check::fail(format!("psi^{i}({x}) is not expressible at level {level}"));
                        break 'outer;
                    };
                    let lhs = emb.theta.forward().apply(&iy)?;
                    let rhs = if is_c && i == n {
                        // ψ^{N+1}(c_k) lies one level out; ι is defined there directly.
                        emb.orbit_word(theta_d.as_ref().expect("C0 nonempty"), j - cert.a_basis.len(), i + 1)?
                    } else {
                        let py = psi.apply(&y, 1)?;
                        match iota.apply(&py) {
                            Some(w) => w,
                            None => {
                                result = Check::fail(format!("psi^{}({x}) is not expressible at level {level}", i + 1));
                                break 'outer;
                            }
                        }
                    };
                    if lhs != rhs {
                        result = Check::fail(format!("symbol {x} shift {i}: theta(iota) = {lhs}, iota(psi) = {rhs}"));
                        break 'outer;
                    }
                }
            }
            result
        }
    };

    let q = cert.c0_basis.len();
    let (injectivity, orbit_free) = match &theta_d {
        None => (Check::ok(), Check::ok()),
        Some(theta_d) => {
            let mut words: Vec<Word> = (0..emb.a_count).map(Word::generator).collect();
            for i in -n..=n {
                for k in 0..q {
                    words.push(emb.orbit_word(theta_d, k, i)?);
                }
            }
            let expected = emb.a_count + (2 * level + 1) * q;
            let got = subgroup_rank(emb.target_rank(), &words)?;
            let inj = if got == expected {
                Check::ok()
            } else {
                Check::fail(format!("rank {got}, expected {expected}"))
            };
            let mut orbit = Vec::new();
            for i in -n..=n {
                for k in 0..emb.d_rank {
                    orbit.push(theta_d.apply(&Word::generator(k).pow(emb.power as i64), i)?);
                }
            }
            let expected = (2 * level + 1) * emb.d_rank;
            let got = subgroup_rank(emb.d_rank, &orbit)?;
            let free = if got == expected {
                Check::ok()
            } else {
                Check::fail(format!("rank {got}, expected {expected}"))
            };
            (inj, free)
        }
    };
    Ok(EmbeddingReport { level, power: emb.power, theta_automorphism, intertwining, injectivity, orbit_free })
}

/// Result of [`embed_with_retry`]: the last embedding built and every
/// report produced on the way.
#[derive(Debug, Clone)]
pub struct EmbeddingRun {
    pub embedding: Embedding,
    pub report: EmbeddingReport,
    pub attempts: Vec<EmbeddingReport>,
}

impl EmbeddingRun {
    pub fn passed(&self) -> bool {
        self.report.all_passed()
    }
}

/// Builds and verifies at powers `start..=max_power`, moving to the next
/// power only when the rank checks (ii) or (iii) fail.
pub fn embed_with_retry(
    cert: &DecompositionCertificate,
    phi: &PhiSpec,
    start: usize,
    max_power: usize,
    level: usize,
) -> Result<EmbeddingRun> {
    let mut attempts = Vec::new();
    let mut n = start.max(1);
    loop {
        let embedding = build_embedding(cert, phi, n)?;
        let report = verify_embedding(&embedding, cert, level)?;
        attempts.push(report.clone());
        let retry = report.theta_automorphism.passed
            && report.intertwining.passed
            && !(report.injectivity.passed && report.orbit_free.passed);
        if !retry || n >= max_power {
            return Ok(EmbeddingRun { embedding, report, attempts });
        }
        n += 1;
    }
}
