//! Dense unsymmetric eigenvalue solver, values only.
//!
//! The matrix is first permuted into block lower-triangular form by
//! condensing the strongly connected components of its sparsity pattern,
//! which is exact arithmetic. Each irreducible diagonal block is then
//! reduced to upper Hessenberg form by Householder similarity and driven
//! to quasi-triangular form with Francis double-shift QR sweeps. Blocks of
//! size one and two short-circuit to closed forms, so triangular and
//! block-ordered matrices (the common case for pinned Laplacians of
//! ordered digraphs) come out exact.

use crate::error::NumericsError;
use crate::matrix::Matrix;
use num_complex::Complex64;

/// Eigenvalues of a real square matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Computes all eigenvalues of a real square matrix.
pub fn eigenvalues(m: &Matrix) -> Result<EigenResult, NumericsError> {
    if m.rows() == 0 {
        return Err(NumericsError::EmptyMatrix);
    }
    if !m.is_square() {
        return Err(NumericsError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.all_finite() {
        return Err(NumericsError::NonFiniteEntry);
    }

    let n = m.rows();
    let mut values = Vec::with_capacity(n);
    let mut iterations = 0;

    for block in diagonal_blocks(m) {
        let (mut vals, its) = block_eigenvalues(&block)?;
        iterations += its;
        values.append(&mut vals);
    }

    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(EigenResult {
        eigenvalues: values,
        iterations,
        converged: true,
    })
}

/// Extracts the irreducible diagonal blocks of `m` after a topological
/// ordering of the strongly connected components of its sparsity pattern.
fn diagonal_blocks(m: &Matrix) -> Vec<Vec<Vec<f64>>> {
    let n = m.rows();
    // Edge j -> i whenever entry (i, j) couples state j into row i.
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| i != j && m[(i, j)] != 0.0).collect())
        .collect();
    let comps = tarjan_scc(&adj);

    comps
        .into_iter()
        .map(|comp| {
            comp.iter()
                .map(|&i| comp.iter().map(|&j| m[(i, j)]).collect())
                .collect()
        })
        .collect()
}

/// Tarjan's algorithm; components are emitted in reverse topological order
/// of the condensation, which is all the block extraction needs.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut comps = Vec::new();

    // Iterative DFS to keep deep graphs off the call stack.
    enum Frame {
        Enter(usize),
        Resume(usize, usize),
    }
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![Frame::Enter(root)];
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Enter(v) => {
                    index[v] = next_index;
                    lowlink[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    work.push(Frame::Resume(v, 0));
                }
                Frame::Resume(v, mut i) => {
                    let mut descend = None;
                    while i < adj[v].len() {
                        let w = adj[v][i];
                        i += 1;
                        if index[w] == usize::MAX {
                            descend = Some(w);
                            break;
                        } else if on_stack[w] {
                            lowlink[v] = lowlink[v].min(index[w]);
                        }
                    }
                    if let Some(w) = descend {
                        work.push(Frame::Resume(v, i));
                        work.push(Frame::Enter(w));
                        continue;
                    }
                    if lowlink[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                    // Propagate lowlink to the parent frame.
                    if let Some(Frame::Resume(p, _)) = work.last() {
                        let p = *p;
                        lowlink[p] = lowlink[p].min(lowlink[v]);
                    }
                }
            }
        }
    }
    comps
}

fn block_eigenvalues(a: &[Vec<f64>]) -> Result<(Vec<Complex64>, usize), NumericsError> {
    match a.len() {
        1 => Ok((vec![Complex64::new(a[0][0], 0.0)], 0)),
        2 => Ok((two_by_two(a[0][0], a[0][1], a[1][0], a[1][1]).to_vec(), 0)),
        _ => francis_qr(a),
    }
}

/// Eigenvalues of a 2x2 block by the stable quadratic formula.
fn two_by_two(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = half_tr * half_tr - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let l1 = if half_tr >= 0.0 {
            half_tr + s
        } else {
            half_tr - s
        };
        let l2 = if l1 != 0.0 { det / l1 } else { half_tr - s };
        [Complex64::new(l1, 0.0), Complex64::new(l2, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [
            Complex64::new(half_tr, s),
            Complex64::new(half_tr, -s),
        ]
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            norm2 += a[i][k] * a[i][k];
        }
        if norm2 == 0.0 {
            continue;
        }
        let norm = norm2.sqrt();
        let lead = a[k + 1][k];
        let sigma = if lead >= 0.0 { norm } else { -norm };
        // v = x + sigma * e1, beta = 2 / ||v||^2
        let mut v = vec![0.0; n];
        v[k + 1] = lead + sigma;
        for i in (k + 2)..n {
            v[i] = a[i][k];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vnorm2;
        // A <- P A with P = I - beta v v^T
        for j in 0..n {
            let mut dot = 0.0;
            for i in (k + 1)..n {
                dot += v[i] * a[i][j];
            }
            let dot = beta * dot;
            for i in (k + 1)..n {
                a[i][j] -= dot * v[i];
            }
        }
        // A <- A P
        for row in a.iter_mut().take(n) {
            let mut dot = 0.0;
            for i in (k + 1)..n {
                dot += row[i] * v[i];
            }
            let dot = beta * dot;
            for i in (k + 1)..n {
                row[i] -= dot * v[i];
            }
        }
        // Clean the annihilated entries to exact zeros.
        a[k + 1][k] = -sigma;
        for i in (k + 2)..n {
            a[i][k] = 0.0;
        }
    }
}

/// Francis double-shift QR on an irreducible block, values only.
///
/// Ported from the classical hqr scheme: deflate from the bottom, take an
/// exceptional shift every ten stalled sweeps, chase a 3x1 bulge.
fn francis_qr(block: &[Vec<f64>]) -> Result<(Vec<Complex64>, usize), NumericsError> {
    let n = block.len();
    let mut h: Vec<Vec<f64>> = block.to_vec();
    hessenberg(&mut h);

    let eps = f64::EPSILON;
    let max_sweeps = 100 * n;
    let mut total_sweeps = 0usize;
    let mut values = Vec::with_capacity(n);

    let anorm: f64 = h
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .skip(i.saturating_sub(1))
                .map(|x| x.abs())
                .sum::<f64>()
        })
        .sum();
    let anorm = if anorm == 0.0 { 1.0 } else { anorm };

    let mut t = 0.0; // accumulated exceptional shifts
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut l = nn;
            while l > 0 {
                let s = h[(l - 1) as usize][(l - 1) as usize].abs()
                    + h[l as usize][l as usize].abs();
                let s = if s == 0.0 { anorm } else { s };
                if h[l as usize][(l - 1) as usize].abs() <= eps * s {
                    h[l as usize][(l - 1) as usize] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = h[nn as usize][nn as usize];
            if l == nn {
                values.push(Complex64::new(x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = h[(nn - 1) as usize][(nn - 1) as usize];
            let w = h[nn as usize][(nn - 1) as usize] * h[(nn - 1) as usize][nn as usize];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t;
                if q >= 0.0 {
                    let z = p + if p >= 0.0 { z } else { -z };
                    let l1 = x + z;
                    let l2 = if z != 0.0 { x - w / z } else { l1 };
                    values.push(Complex64::new(l1, 0.0));
                    values.push(Complex64::new(l2, 0.0));
                } else {
                    values.push(Complex64::new(x + p, z));
                    values.push(Complex64::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            if total_sweeps >= max_sweeps {
                return Err(NumericsError::QrNonConvergence {
                    sweeps: total_sweeps,
                });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for i in 0..=nn as usize {
                    h[i][i] -= x;
                }
                let s = h[nn as usize][(nn - 1) as usize].abs()
                    + h[(nn - 1) as usize][(nn - 2) as usize].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_sweeps += 1;

            // Find two consecutive small subdiagonals.
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let z = h[m as usize][m as usize];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(m + 1) as usize][m as usize] + h[m as usize][(m + 1) as usize];
                q = h[(m + 1) as usize][(m + 1) as usize] - z - rr - ss;
                r = h[(m + 2) as usize][(m + 1) as usize];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[m as usize][(m - 1) as usize].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (h[(m - 1) as usize][(m - 1) as usize].abs()
                        + h[m as usize][m as usize].abs()
                        + h[(m + 1) as usize][(m + 1) as usize].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                h[i as usize][(i - 2) as usize] = 0.0;
                if i != m + 2 {
                    h[i as usize][(i - 3) as usize] = 0.0;
                }
            }

            // Double QR step: chase the bulge from m to nn-1.
            for k in m..nn {
                let ku = k as usize;
                if k != m {
                    p = h[ku][ku - 1];
                    q = h[ku + 1][ku - 1];
                    r = if k != nn - 1 { h[ku + 2][ku - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = (p * p + q * q + r * r).sqrt();
                let s = if p >= 0.0 { s } else { -s };
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[ku][ku - 1] = -h[ku][ku - 1];
                    }
                } else {
                    h[ku][ku - 1] = -s * x;
                }
                p += s;
                let px = p / s;
                let qy = q / s;
                let rz = r / s;
                let qp = q / p;
                let rp = r / p;
                // Row modification.
                for j in ku..=(nn as usize) {
                    let mut pp = h[ku][j] + qp * h[ku + 1][j];
                    if k != nn - 1 {
                        pp += rp * h[ku + 2][j];
                        h[ku + 2][j] -= pp * rz;
                    }
                    h[ku + 1][j] -= pp * qy;
                    h[ku][j] -= pp * px;
                }
                // Column modification.
                let mmin = if nn < k + 4 { nn as usize } else { ku + 3 };
                for row in h.iter_mut().take(mmin + 1).skip(l as usize) {
                    let mut pp = px * row[ku] + qy * row[ku + 1];
                    if k != nn - 1 {
                        pp += rz * row[ku + 2];
                        row[ku + 2] -= pp * rp;
                    }
                    row[ku + 1] -= pp * qp;
                    row[ku] -= pp;
                }
            }
        }
    }
    Ok((values, total_sweeps))
}
