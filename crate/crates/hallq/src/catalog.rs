//! The catalog of indecomposable representations of the Rudakov quiver.
//!
//! Labels are field-independent data: preprojectives `P_n`, preinjectives
//! `I_n`, their primed (σ-image) versions, the two projective-injectives `M`
//! and `M'`, and the regular classes `R_φ(n)` / `R'_φ(n)` indexed by a monic
//! irreducible polynomial φ (or the zero polynomial, the extra point of P¹)
//! and a multiplicity n.  The identifications `P'_0 = I_0` and `I'_0 = P_0`
//! are applied at construction, so every iso-class has a unique normal form.
//!
//! The module provides closed-form Hom dimensions between labels, the
//! automorphism-count product formula, and enumeration of all iso-classes of
//! a given dimension vector.

use crate::gf::{poly_deg, sigma_set, FqField, PolyFq};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// A label for an indecomposable representation.
///
/// The variant order gives the canonical sort order used when displaying
/// iso-classes (I < I' < M < M' < P < P' < R < R').
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndecompLabel {
    /// Preinjective I_n, dimension (n+1, n); I_0 is the simple at vertex 1.
    I(u32),
    /// Primed preinjective I'_n = σ(I_n), dimension (n, n+1); n ≥ 1.
    Ip(u32),
    /// The projective-injective M, dimension (2,2).
    M,
    /// The projective-injective M' = σ(M), dimension (2,2).
    Mp,
    /// Preprojective P_n, dimension (n, n+1); P_0 is the simple at vertex 2.
    P(u32),
    /// Primed preprojective P'_n = σ(P_n), dimension (n+1, n); n ≥ 1.
    Pp(u32),
    /// Regular R_φ(n), dimension (dn, dn) with d = deg φ.
    Reg(PolyFq, u32),
    /// Primed regular R'_φ(n) = σ(R_φ(n)).
    RegP(PolyFq, u32),
}

impl IndecompLabel {
    /// P'_n with the identification P'_0 = I_0.
    pub fn pp(n: u32) -> IndecompLabel {
        if n == 0 {
            IndecompLabel::I(0)
        } else {
            IndecompLabel::Pp(n)
        }
    }

    /// I'_n with the identification I'_0 = P_0.
    pub fn ip(n: u32) -> IndecompLabel {
        if n == 0 {
            IndecompLabel::P(0)
        } else {
            IndecompLabel::Ip(n)
        }
    }

    /// Dimension vector (d₁, d₂).
    pub fn dim(&self) -> (u32, u32) {
        match self {
            IndecompLabel::P(n) => (*n, n + 1),
            IndecompLabel::I(n) => (n + 1, *n),
            IndecompLabel::Pp(n) => (n + 1, *n),
            IndecompLabel::Ip(n) => (*n, n + 1),
            IndecompLabel::M | IndecompLabel::Mp => (2, 2),
            IndecompLabel::Reg(phi, n) | IndecompLabel::RegP(phi, n) => {
                let d = poly_deg(phi) as u32 * n;
                (d, d)
            }
        }
    }

    /// Is this one of the unprimed Kronecker labels (e', f' act by zero)?
    pub fn is_unprimed_kronecker(&self) -> bool {
        matches!(
            self,
            IndecompLabel::P(_) | IndecompLabel::I(_) | IndecompLabel::Reg(..)
        )
    }

    /// Is this one of the primed Kronecker labels (e, f act by zero)?
    pub fn is_primed_kronecker(&self) -> bool {
        matches!(
            self,
            IndecompLabel::Pp(_) | IndecompLabel::Ip(_) | IndecompLabel::RegP(..)
        )
    }

    /// The σ-image (covariant swap of vertices and of e,f with e',f').
    pub fn sigma(&self) -> IndecompLabel {
        match self {
            IndecompLabel::P(n) => IndecompLabel::pp(*n),
            IndecompLabel::Pp(n) => IndecompLabel::P(*n),
            IndecompLabel::I(n) => IndecompLabel::ip(*n),
            IndecompLabel::Ip(n) => IndecompLabel::I(*n),
            IndecompLabel::M => IndecompLabel::Mp,
            IndecompLabel::Mp => IndecompLabel::M,
            IndecompLabel::Reg(phi, n) => IndecompLabel::RegP(phi.clone(), *n),
            IndecompLabel::RegP(phi, n) => IndecompLabel::Reg(phi.clone(), *n),
        }
    }

    /// The τ-image (contravariant duality).
    pub fn tau(&self) -> IndecompLabel {
        match self {
            IndecompLabel::P(n) => IndecompLabel::ip(*n),
            IndecompLabel::Ip(n) => IndecompLabel::P(*n),
            IndecompLabel::I(n) => IndecompLabel::pp(*n),
            IndecompLabel::Pp(n) => IndecompLabel::I(*n),
            IndecompLabel::M => IndecompLabel::M,
            IndecompLabel::Mp => IndecompLabel::Mp,
            IndecompLabel::Reg(phi, n) => IndecompLabel::RegP(phi.clone(), *n),
            IndecompLabel::RegP(phi, n) => IndecompLabel::Reg(phi.clone(), *n),
        }
    }

    /// Division-algebra degree of End: deg φ for regulars, 1 otherwise.
    pub fn residue_degree(&self) -> u32 {
        match self {
            IndecompLabel::Reg(phi, _) | IndecompLabel::RegP(phi, _) => poly_deg(phi) as u32,
            _ => 1,
        }
    }
}

/// dim Hom between two Kronecker labels on the SAME side (both unprimed),
/// from the closed-form table.
fn kron_hom(a: &IndecompLabel, b: &IndecompLabel) -> u32 {
    use IndecompLabel::*;
    match (a, b) {
        (P(n), P(m)) => {
            if m >= n {
                m - n + 1
            } else {
                0
            }
        }
        (I(n), I(m)) => {
            if n >= m {
                n - m + 1
            } else {
                0
            }
        }
        (P(n), I(m)) => n + m,
        (I(_), P(_)) => 0,
        (P(_), Reg(phi, r)) => poly_deg(phi) as u32 * r,
        (Reg(..), P(_)) => 0,
        (Reg(phi, r), I(_)) => poly_deg(phi) as u32 * r,
        (I(_), Reg(..)) => 0,
        (Reg(phi, m), Reg(pi, n)) => {
            if phi == pi {
                poly_deg(phi) as u32 * m.min(n)
            } else {
                0
            }
        }
        _ => unreachable!("kron_hom on non-Kronecker labels"),
    }
}

/// dim Ext¹ between two unprimed Kronecker labels, via the Euler form
/// ⟨(a,b),(c,d)⟩ = ac + bd − 2ad and the Hom table.
pub fn kron_ext(a: &IndecompLabel, b: &IndecompLabel) -> u32 {
    let (x1, x2) = a.dim();
    let (y1, y2) = b.dim();
    let euler = x1 as i64 * y1 as i64 + x2 as i64 * y2 as i64 - 2 * x1 as i64 * y2 as i64;
    let h = kron_hom(a, b) as i64;
    u32::try_from(h - euler).expect("negative Ext dimension")
}

/// Closed-form dim Hom(X, Y) between indecomposable labels.
///
/// Uses: the Kronecker table on each side, Hom(M, Y) ≅ Y₁, Hom(M', Y) ≅ Y₂,
/// Hom(Y, M) ≅ Y₁*, Hom(Y, M') ≅ Y₂*, and the saturation lemma for the mixed
/// cases: Hom(unprimed, primed) = d₁(X)·d₁(Y), Hom(primed, unprimed) =
/// d₂(X)·d₂(Y) (both formulas absorb the I₀/P₀ edge cases since those have a
/// zero coordinate).
pub fn hom_dim_formula(x: &IndecompLabel, y: &IndecompLabel) -> u32 {
    use IndecompLabel::*;
    match (x, y) {
        (M, _) => y.dim().0,
        (Mp, _) => y.dim().1,
        (_, M) => x.dim().0,
        (_, Mp) => x.dim().1,
        _ => {
            let xu = x.is_unprimed_kronecker();
            let yu = y.is_unprimed_kronecker();
            match (xu, yu) {
                (true, true) => kron_hom(x, y),
                (false, false) => kron_hom(&x.sigma(), &y.sigma()),
                (true, false) => x.dim().0 * y.dim().0,
                (false, true) => x.dim().1 * y.dim().1,
            }
        }
    }
}

fn fmt_poly(phi: &PolyFq, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if phi.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for i in (0..phi.len()).rev() {
        let c = phi[i];
        if c == 0 {
            continue;
        }
        if !first {
            write!(f, "+")?;
        }
        first = false;
        if i == 0 {
            write!(f, "{c}")?;
        } else {
            if c != 1 {
                write!(f, "{c}*")?;
            }
            if i == 1 {
                write!(f, "x")?;
            } else {
                write!(f, "x^{i}")?;
            }
        }
    }
    if first {
        // all-zero coefficient vector can't happen for monic φ, but be safe
        write!(f, "0")?;
    }
    Ok(())
}

/// Parse "x^2+x+1", "2*x+1", "x", "0" into a coefficient vector.
pub fn parse_poly(s: &str) -> Result<PolyFq, String> {
    let s = s.trim();
    if s == "0" {
        return Ok(vec![]);
    }
    let mut coeffs: BTreeMap<usize, u8> = BTreeMap::new();
    for term in s.split('+') {
        let term = term.trim().replace(' ', "");
        let (coef, pow): (u8, usize) = if let Some(rest) = term.strip_prefix("x^") {
            (1, rest.parse().map_err(|_| format!("bad power in {term}"))?)
        } else if term == "x" {
            (1, 1)
        } else if let Some(idx) = term.find('x') {
            let cpart = term[..idx].trim_end_matches('*');
            let c: u8 = cpart.parse().map_err(|_| format!("bad coefficient in {term}"))?;
            let rest = &term[idx + 1..];
            let p = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .ok_or(format!("bad term {term}"))?
                    .parse()
                    .map_err(|_| format!("bad power in {term}"))?
            };
            (c, p)
        } else {
            (term.parse().map_err(|_| format!("bad constant in {term}"))?, 0)
        };
        *coeffs.entry(pow).or_insert(0) += coef;
    }
    let deg = *coeffs.keys().max().unwrap();
    let mut out = vec![0u8; deg + 1];
    for (p, c) in coeffs {
        out[p] = c;
    }
    if out.last() != Some(&1) {
        return Err(format!("polynomial {s} is not monic"));
    }
    Ok(out)
}

impl fmt::Display for IndecompLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndecompLabel::P(n) => write!(f, "P{n}"),
            IndecompLabel::I(n) => write!(f, "I{n}"),
            IndecompLabel::Pp(n) => write!(f, "P'{n}"),
            IndecompLabel::Ip(n) => write!(f, "I'{n}"),
            IndecompLabel::M => write!(f, "M"),
            IndecompLabel::Mp => write!(f, "M'"),
            IndecompLabel::Reg(phi, n) => {
                write!(f, "R(")?;
                fmt_poly(phi, f)?;
                write!(f, ";{n})")
            }
            IndecompLabel::RegP(phi, n) => {
                write!(f, "R'(")?;
                fmt_poly(phi, f)?;
                write!(f, ";{n})")
            }
        }
    }
}

impl FromStr for IndecompLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "M" => return Ok(IndecompLabel::M),
            "M'" => return Ok(IndecompLabel::Mp),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("R'(").or_else(|| s.strip_prefix("R'(")) {
            let body = rest.strip_suffix(')').ok_or("missing )")?;
            let (phi, n) = body.split_once(';').ok_or("missing ;")?;
            return Ok(IndecompLabel::RegP(
                parse_poly(phi)?,
                n.trim().parse().map_err(|_| "bad multiplicity")?,
            ));
        }
        if let Some(rest) = s.strip_prefix("R(") {
            let body = rest.strip_suffix(')').ok_or("missing )")?;
            let (phi, n) = body.split_once(';').ok_or("missing ;")?;
            return Ok(IndecompLabel::Reg(
                parse_poly(phi)?,
                n.trim().parse().map_err(|_| "bad multiplicity")?,
            ));
        }
        let (head, primed, idx) = if let Some(rest) = s.strip_prefix("P'") {
            ('P', true, rest)
        } else if let Some(rest) = s.strip_prefix("I'") {
            ('I', true, rest)
        } else if let Some(rest) = s.strip_prefix('P') {
            ('P', false, rest)
        } else if let Some(rest) = s.strip_prefix('I') {
            ('I', false, rest)
        } else {
            return Err(format!("unrecognized label {s}"));
        };
        let n: u32 = idx.trim().parse().map_err(|_| format!("bad index in {s}"))?;
        Ok(match (head, primed) {
            ('P', false) => IndecompLabel::P(n),
            ('P', true) => IndecompLabel::pp(n),
            ('I', false) => IndecompLabel::I(n),
            ('I', true) => IndecompLabel::ip(n),
            _ => unreachable!(),
        })
    }
}

/// An isomorphism class: a sorted multiset of indecomposable labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IsoClass(Vec<IndecompLabel>);

impl IsoClass {
    /// The zero object.
    pub fn zero() -> IsoClass {
        IsoClass(vec![])
    }

    pub fn new(mut labels: Vec<IndecompLabel>) -> IsoClass {
        labels.sort();
        IsoClass(labels)
    }

    pub fn single(label: IndecompLabel) -> IsoClass {
        IsoClass(vec![label])
    }

    pub fn labels(&self) -> &[IndecompLabel] {
        &self.0
    }

    pub fn is_zero_object(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> (u32, u32) {
        self.0.iter().fold((0, 0), |(a, b), l| {
            let (x, y) = l.dim();
            (a + x, b + y)
        })
    }

    /// Direct sum.
    pub fn plus(&self, other: &IsoClass) -> IsoClass {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        IsoClass::new(v)
    }

    /// Labels with multiplicities.
    pub fn with_mult(&self) -> Vec<(IndecompLabel, u32)> {
        let mut out: Vec<(IndecompLabel, u32)> = Vec::new();
        for l in &self.0 {
            match out.last_mut() {
                Some((prev, m)) if prev == l => *m += 1,
                _ => out.push((l.clone(), 1)),
            }
        }
        out
    }

    /// Multiplicity of one label.
    pub fn mult_of(&self, label: &IndecompLabel) -> u32 {
        self.0.iter().filter(|l| *l == label).count() as u32
    }

    /// Remove `count` copies of `label` (panics if absent).
    pub fn without(&self, label: &IndecompLabel, count: u32) -> IsoClass {
        let mut v = self.0.clone();
        for _ in 0..count {
            let pos = v.iter().position(|l| l == label).expect("label not present");
            v.remove(pos);
        }
        IsoClass(v)
    }

    pub fn sigma(&self) -> IsoClass {
        IsoClass::new(self.0.iter().map(|l| l.sigma()).collect())
    }

    pub fn tau(&self) -> IsoClass {
        IsoClass::new(self.0.iter().map(|l| l.tau()).collect())
    }

    /// dim End of the module: Σ m_i m_j · hom(L_i, L_j).
    pub fn end_dim(&self) -> u32 {
        let wm = self.with_mult();
        let mut total = 0;
        for (a, ma) in &wm {
            for (b, mb) in &wm {
                total += ma * mb * hom_dim_formula(a, b);
            }
        }
        total
    }

    /// dim Hom(self, other) by bilinearity of the closed-form table.
    pub fn hom_dim_to(&self, other: &IsoClass) -> u32 {
        let mut total = 0;
        for a in &self.0 {
            for b in &other.0 {
                total += hom_dim_formula(a, b);
            }
        }
        total
    }
}

impl fmt::Display for IsoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for IsoClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(IsoClass::zero());
        }
        // Labels are joined with '+', but regular labels contain '+' inside
        // parentheses — split at depth 0 only.
        let mut parts = Vec::new();
        let mut depth = 0usize;
        let mut cur = String::new();
        for ch in s.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch);
                }
                '+' if depth == 0 => {
                    parts.push(std::mem::take(&mut cur));
                }
                _ => cur.push(ch),
            }
        }
        parts.push(cur);
        let labels = parts
            .iter()
            .map(|p| p.parse::<IndecompLabel>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IsoClass::new(labels))
    }
}

/// |GL_m(F_Q)| = ∏_{i<m} (Q^m − Q^i).
pub fn gl_order(m: u32, q_big: &BigInt) -> BigInt {
    let qm = q_big.pow(m);
    let mut acc = BigInt::one();
    for i in 0..m {
        acc *= &qm - q_big.pow(i);
    }
    acc
}

/// |Aut(X)| for an iso-class, by the product formula over indecomposable
/// isotypic components:
///   ∏_{i≠j} q^{hom(L_i,L_j) mᵢmⱼ} · ∏_i |GL_{mᵢ}(F_{q^{dᵢ}})| q^{(cᵢ−dᵢ)mᵢ²}
/// with cᵢ = dim End(Lᵢ) and dᵢ its residue degree.
pub fn alpha(class: &IsoClass, q: u64) -> BigInt {
    let qb = BigInt::from(q);
    let wm = class.with_mult();
    let mut acc = BigInt::one();
    for (i, (a, ma)) in wm.iter().enumerate() {
        for (j, (b, mb)) in wm.iter().enumerate() {
            if i != j {
                acc *= qb.pow(hom_dim_formula(a, b) * ma * mb);
            }
        }
    }
    for (a, m) in &wm {
        let d = a.residue_degree();
        let c = hom_dim_formula(a, a);
        let qd = qb.pow(d);
        acc *= gl_order(*m, &qd);
        acc *= qb.pow((c - d) * m * m);
    }
    acc
}

/// All indecomposable labels with dimension vector ≤ (a, b) componentwise.
pub fn labels_within(field: &FqField, a: u32, b: u32) -> Vec<IndecompLabel> {
    let mut out = Vec::new();
    // I_n: (n+1, n)
    for n in 0..=b.min(a.saturating_sub(1)) {
        if n + 1 <= a {
            out.push(IndecompLabel::I(n));
        }
    }
    // I'_n: (n, n+1), n ≥ 1
    for n in 1..=a.min(b.saturating_sub(1)) {
        if n <= a && n + 1 <= b {
            out.push(IndecompLabel::Ip(n));
        }
    }
    if a >= 2 && b >= 2 {
        out.push(IndecompLabel::M);
        out.push(IndecompLabel::Mp);
    }
    // P_n: (n, n+1)
    for n in 0..=a.min(b.saturating_sub(1)) {
        if n <= a && n + 1 <= b {
            out.push(IndecompLabel::P(n));
        }
    }
    // P'_n: (n+1, n), n ≥ 1
    for n in 1..=b.min(a.saturating_sub(1)) {
        if n + 1 <= a {
            out.push(IndecompLabel::Pp(n));
        }
    }
    // Regulars.
    let cap = a.min(b);
    for d in 1..=cap {
        for phi in sigma_set(field, d as usize) {
            for n in 1..=cap / d {
                out.push(IndecompLabel::Reg(phi.clone(), n));
                out.push(IndecompLabel::RegP(phi.clone(), n));
            }
        }
    }
    out.sort();
    out
}

/// Enumerate all iso-classes with dimension vector exactly (a, b).
pub fn enumerate_isoclasses(field: &FqField, a: u32, b: u32) -> Vec<IsoClass> {
    let labels = labels_within(field, a, b);
    let mut out = Vec::new();
    let mut current: Vec<IndecompLabel> = Vec::new();
    fn recurse(
        labels: &[IndecompLabel],
        idx: usize,
        rem: (u32, u32),
        current: &mut Vec<IndecompLabel>,
        out: &mut Vec<IsoClass>,
    ) {
        if rem == (0, 0) {
            out.push(IsoClass::new(current.clone()));
            return;
        }
        if idx >= labels.len() {
            return;
        }
        let (da, db) = labels[idx].dim();
        // Skip this label entirely.
        recurse(labels, idx + 1, rem, current, out);
        // Or take one copy and stay (multiset).
        if da <= rem.0 && db <= rem.1 && (da, db) != (0, 0) {
            current.push(labels[idx].clone());
            recurse(labels, idx, (rem.0 - da, rem.1 - db), current, out);
            current.pop();
        }
    }
    recurse(&labels, 0, (a, b), &mut current, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrimePower;

    fn f2() -> FqField {
        FqField::new(PrimePower::new(2, 1))
    }

    #[test]
    fn canonical_identifications() {
        assert_eq!(IndecompLabel::pp(0), IndecompLabel::I(0));
        assert_eq!(IndecompLabel::ip(0), IndecompLabel::P(0));
        assert_eq!(IndecompLabel::P(0).sigma(), IndecompLabel::I(0));
        assert_eq!(IndecompLabel::P(0).tau(), IndecompLabel::P(0));
        assert_eq!(IndecompLabel::I(0).tau(), IndecompLabel::I(0));
        assert_eq!(IndecompLabel::M.tau(), IndecompLabel::M);
        // σ and τ are involutions and commute.
        let f = f2();
        for l in labels_within(&f, 3, 3) {
            assert_eq!(l.sigma().sigma(), l);
            assert_eq!(l.tau().tau(), l);
            assert_eq!(l.sigma().tau(), l.tau().sigma());
        }
    }

    #[test]
    fn display_parse_roundtrip() {
        let f = f2();
        for l in labels_within(&f, 4, 4) {
            let s = l.to_string();
            let back: IndecompLabel = s.parse().unwrap();
            assert_eq!(back, l, "roundtrip failed for {s}");
        }
        let c: IsoClass = "I0+P1".parse().unwrap();
        assert_eq!(c.to_string(), "I0+P1");
        let r: IsoClass = "R(x^2+x+1;2)+M".parse().unwrap();
        assert_eq!(r.dim(), (6, 6));
        assert_eq!("0".parse::<IsoClass>().unwrap(), IsoClass::zero());
    }

    #[test]
    fn hom_table_spot_checks() {
        use IndecompLabel::*;
        // Hom(P_n, P_m) = m−n+1 for m ≥ n.
        assert_eq!(hom_dim_formula(&P(1), &P(3)), 3);
        assert_eq!(hom_dim_formula(&P(3), &P(1)), 0);
        // End dims.
        assert_eq!(hom_dim_formula(&M, &M), 2);
        assert_eq!(hom_dim_formula(&Mp, &Mp), 2);
        // Cor "mhom": Hom(M, Y) = Y₁, Hom(Y, M) = Y₁.
        assert_eq!(hom_dim_formula(&M, &P(2)), 2);
        assert_eq!(hom_dim_formula(&P(2), &M), 2);
        assert_eq!(hom_dim_formula(&Mp, &P(2)), 3);
        // Mixed sides.
        assert_eq!(hom_dim_formula(&P(1), &Pp(1)), 2);
        assert_eq!(hom_dim_formula(&Pp(1), &P(1)), 2);
        assert_eq!(hom_dim_formula(&I(0), &Pp(1)), 2);
        assert_eq!(hom_dim_formula(&Pp(1), &I(0)), 0);
        assert_eq!(hom_dim_formula(&P(0), &Pp(1)), 0);
        // Regulars.
        let x = vec![0u8, 1];
        assert_eq!(hom_dim_formula(&Reg(x.clone(), 2), &Reg(x.clone(), 3)), 2);
        assert_eq!(hom_dim_formula(&Reg(x.clone(), 2), &Reg(vec![1, 1], 3)), 0);
        assert_eq!(hom_dim_formula(&Reg(vec![], 1), &Reg(x, 1)), 0);
    }

    #[test]
    fn ext_table_spot_checks() {
        use IndecompLabel::*;
        assert_eq!(kron_ext(&P(3), &P(1)), 1);
        assert_eq!(kron_ext(&P(1), &P(3)), 0);
        assert_eq!(kron_ext(&I(0), &P(0)), 2);
        assert_eq!(kron_ext(&P(0), &I(0)), 0);
        let x = vec![0u8, 1];
        assert_eq!(kron_ext(&Reg(x.clone(), 1), &P(1)), 1);
        assert_eq!(kron_ext(&P(1), &Reg(x.clone(), 1)), 0);
        assert_eq!(kron_ext(&I(1), &Reg(x.clone(), 1)), 1);
        assert_eq!(kron_ext(&Reg(x.clone(), 2), &Reg(x, 2)), 2);
    }

    #[test]
    fn alpha_closed_forms() {
        use IndecompLabel::*;
        // α(R_φ(k)) = q^{dk}(1 − q^{−d}).
        let x = vec![0u8, 1];
        assert_eq!(alpha(&IsoClass::single(Reg(x.clone(), 2)), 2), BigInt::from(2));
        // |Aut M| = q(q−1).
        assert_eq!(alpha(&IsoClass::single(M), 2), BigInt::from(2));
        assert_eq!(alpha(&IsoClass::single(M), 3), BigInt::from(6));
        // |Aut M^n| = q^{n²}|GL_n(F_q)|.
        let m2 = IsoClass::new(vec![M, M]);
        assert_eq!(alpha(&m2, 2), BigInt::from(16 * 6));
        // α(P₀ ⊕ I₀) = (q−1)².
        let pi = IsoClass::new(vec![P(0), I(0)]);
        assert_eq!(alpha(&pi, 3), BigInt::from(4));
        // deg-2 regular: α = q²(1−q^{−2}) = q²−1... times q^... : d=2, k=1:
        // α = q^{2}(1−q^{-2}) = q²−1 = 3 at q=2.
        let quad = vec![1u8, 1, 1];
        assert_eq!(alpha(&IsoClass::single(Reg(quad, 1)), 2), BigInt::from(3));
    }

    #[test]
    fn enumerate_counts() {
        let f = f2();
        // Dimension (1,0): just I0.
        assert_eq!(
            enumerate_isoclasses(&f, 1, 0),
            vec![IsoClass::single(IndecompLabel::I(0))]
        );
        // Dimension (1,1): P0⊕I0 and the q+1 = 3 regulars R_φ(1).
        let c11 = enumerate_isoclasses(&f, 1, 1);
        assert_eq!(c11.len(), 1 + 3 + 3); // split, regulars, primed regulars
        // Dimension (2,2) over F_2: count and sanity check dims.
        for c in enumerate_isoclasses(&f, 2, 2) {
            assert_eq!(c.dim(), (2, 2));
        }
    }

    #[test]
    fn end_dim_bilinear() {
        use IndecompLabel::*;
        let c = IsoClass::new(vec![P(0), I(0)]);
        // End(P0⊕I0) = End(P0)⊕End(I0) ⊕ Hom(P0,I0) ⊕ Hom(I0,P0) = 1+1+0+0.
        assert_eq!(c.end_dim(), 2);
        assert_eq!(IsoClass::single(M).end_dim(), 2);
    }
}
