//! w-Jacobi diagrams (arrow diagrams with two-in-one-out internal vertices)
//! and the bracket-rise elimination of internal vertices via the directed
//! STU relations.

use super::{ArrowCombination, ArrowDiagram, ArrowError, End, Skeleton};
use crate::linalg::rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndKind {
    Head,
    Tail,
}

/// An internal trivalent vertex: two arrows in (left and right, giving the
/// vertex orientation) and one arrow out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JVertex {
    pub left: usize,
    pub right: usize,
    pub out: usize,
}

/// A w-Jacobi diagram on a long-line skeleton. Edges are numbered; each
/// edge's head end is either a skeleton token or an in-slot of a vertex,
/// and its tail end is either a skeleton token or the out-slot of a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiDiagram {
    pub n_edges: usize,
    pub skel: Vec<(usize, EndKind)>,
    pub vertices: Vec<JVertex>,
}

impl JacobiDiagram {
    /// Validates the two-ends-per-edge bookkeeping.
    pub fn validate(&self) -> Result<(), ArrowError> {
        let mut heads = vec![0usize; self.n_edges];
        let mut tails = vec![0usize; self.n_edges];
        let check = |e: usize| -> Result<(), ArrowError> {
            if e >= self.n_edges {
                Err(ArrowError::MalformedJacobi {
                    reason: format!("edge {e} out of range"),
                })
            } else {
                Ok(())
            }
        };
        for &(e, kind) in &self.skel {
            check(e)?;
            match kind {
                EndKind::Head => heads[e] += 1,
                EndKind::Tail => tails[e] += 1,
            }
        }
        for v in &self.vertices {
            for e in [v.left, v.right] {
                check(e)?;
                heads[e] += 1;
            }
            check(v.out)?;
            tails[v.out] += 1;
        }
        for e in 0..self.n_edges {
            if heads[e] != 1 || tails[e] != 1 {
                return Err(ArrowError::MalformedJacobi {
                    reason: format!(
                        "edge {e} has {} head ends and {} tail ends",
                        heads[e], tails[e]
                    ),
                });
            }
        }
        if !(self.skel.len() + self.vertices.len()).is_multiple_of(2) {
            return Err(ArrowError::MalformedJacobi {
                reason: "odd number of trivalent vertices".into(),
            });
        }
        Ok(())
    }

    /// Half the number of trivalent vertices (skeleton and internal).
    pub fn degree(&self) -> usize {
        (self.skel.len() + self.vertices.len()) / 2
    }

    /// A pure arrow diagram regarded as a Jacobi diagram.
    pub fn from_arrow(d: &ArrowDiagram) -> Self {
        let ends = d.ends().expect("line or circle diagram");
        JacobiDiagram {
            n_edges: d.degree(),
            skel: ends
                .iter()
                .map(|e| {
                    (
                        e.arrow as usize,
                        if e.head { EndKind::Head } else { EndKind::Tail },
                    )
                })
                .collect(),
            vertices: vec![],
        }
    }

    fn to_arrow(&self) -> ArrowDiagram {
        debug_assert!(self.vertices.is_empty());
        let ends: Vec<End> = self
            .skel
            .iter()
            .map(|&(e, kind)| End {
                arrow: e as u8,
                head: matches!(kind, EndKind::Head),
            })
            .collect();
        ArrowDiagram::line_from_ends(&ends)
    }

    /// Eliminates all internal vertices by directed STU rewriting along
    /// skeleton-contacting edges, in the given scan order. The image in the
    /// TC+4T quotient is independent of the order.
    pub fn stu_eliminate(&self, order: ElimOrder) -> Result<ArrowCombination, ArrowError> {
        self.validate()?;
        let trunc = self.degree();
        let mut out = ArrowCombination::zero(Skeleton::LongLine, trunc);
        self.eliminate_rec(order, rat(1), &mut out)?;
        Ok(out)
    }

    fn eliminate_rec(
        &self,
        order: ElimOrder,
        coeff: crate::linalg::Rat,
        out: &mut ArrowCombination,
    ) -> Result<(), ArrowError> {
        if self.vertices.is_empty() {
            out.add_diagram(self.to_arrow(), coeff);
            return Ok(());
        }
        // skeleton positions whose edge's other end is at a vertex
        let vertex_of_head: std::collections::BTreeMap<usize, usize> = self
            .vertices
            .iter()
            .enumerate()
            .flat_map(|(vi, v)| [(v.left, vi), (v.right, vi)])
            .collect();
        let vertex_of_tail: std::collections::BTreeMap<usize, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(vi, v)| (v.out, vi))
            .collect();
        let contacts: Vec<usize> = (0..self.skel.len())
            .filter(|&p| {
                let (e, kind) = self.skel[p];
                match kind {
                    // head on skeleton: is the tail at a vertex out-slot?
                    EndKind::Head => vertex_of_tail.contains_key(&e),
                    // tail on skeleton: is the head at a vertex in-slot?
                    EndKind::Tail => vertex_of_head.contains_key(&e),
                }
            })
            .collect();
        let &p = match order {
            ElimOrder::Leftmost => contacts.first(),
            ElimOrder::Rightmost => contacts.last(),
        }
        .ok_or_else(|| ArrowError::MalformedJacobi {
            reason: "a component has no skeleton contact".into(),
        })?;
        let (e, kind) = self.skel[p];
        // the resolution replaces token p by two freed ends, in two orders
        let (vi, first, second) = match kind {
            EndKind::Head => {
                // STU1 along the out-edge e of vertex v:
                // vertex = (Lh, Rh) - (Rh, Lh)
                let vi = vertex_of_tail[&e];
                let v = self.vertices[vi];
                (vi, (v.left, EndKind::Head), (v.right, EndKind::Head))
            }
            EndKind::Tail => {
                let vi = vertex_of_head[&e];
                let v = self.vertices[vi];
                if v.left == e {
                    // central edge in the left slot:
                    // vertex = (Rh, Gt) - (Gt, Rh)
                    (vi, (v.right, EndKind::Head), (v.out, EndKind::Tail))
                } else {
                    // central edge in the right slot: the orientation flips:
                    // vertex = (Gt, Lh) - (Lh, Gt)
                    (vi, (v.out, EndKind::Tail), (v.left, EndKind::Head))
                }
            }
        };
        for (sign, a, b) in [(1i64, first, second), (-1, second, first)] {
            let mut child = self.clone();
            child.vertices.remove(vi);
            child.skel.splice(p..=p, [a, b]);
            // drop edge e entirely and compact ids
            child.remove_edge(e);
            child.eliminate_rec(order, &coeff * rat(sign), out)?;
        }
        Ok(())
    }

    fn remove_edge(&mut self, e: usize) {
        self.skel.retain(|&(x, _)| x != e);
        let remap = |x: usize| if x > e { x - 1 } else { x };
        for t in self.skel.iter_mut() {
            t.0 = remap(t.0);
        }
        for v in self.vertices.iter_mut() {
            v.left = remap(v.left);
            v.right = remap(v.right);
            v.out = remap(v.out);
        }
        self.n_edges -= 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElimOrder {
    /// Always resolve the skeleton-contacting edge with the leftmost
    /// skeleton endpoint.
    #[default]
    Leftmost,
    /// The opposite scan; used to test order independence.
    Rightmost,
}

/// The canonical k-wheel as a w-Jacobi diagram: hub vertices v_1..v_k with
/// spokes (tails on the skeleton, in hub order) entering the left slots and
/// the rim entering the right slots.
pub fn wheel_jacobi(k: usize) -> JacobiDiagram {
    assert!(k >= 1);
    // edges 0..k = spokes, k..2k = rim (rim edge i runs v_i -> v_{i+1})
    let skel = (0..k).map(|i| (i, EndKind::Tail)).collect();
    let vertices = (0..k)
        .map(|i| JVertex {
            left: i,
            right: k + ((i + k - 1) % k),
            out: k + i,
        })
        .collect();
    JacobiDiagram {
        n_edges: 2 * k,
        skel,
        vertices,
    }
}

/// w_k as a pure-arrow combination (spokes at the canonical position).
pub fn wheel_element(k: usize, order: ElimOrder) -> Result<ArrowCombination, ArrowError> {
    wheel_jacobi(k).stu_eliminate(order)
}

/// The class of D_L (equal to D_R in the s-quotients).
pub fn d_a_element() -> ArrowCombination {
    ArrowCombination::single(
        ArrowDiagram::parse_line("H1 T1").expect("static token string"),
        1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrows::{EnumerationCaps, QuotientSpace, SpaceKind};

    #[test]
    fn pure_diagram_eliminates_to_itself() {
        let d = ArrowDiagram::parse_line("T1 H2 H1 T2").unwrap();
        let j = JacobiDiagram::from_arrow(&d);
        let out = j.stu_eliminate(ElimOrder::Leftmost).unwrap();
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.terms.get(&d), Some(&rat(1)));
    }

    #[test]
    fn one_wheel_is_dl_minus_dr() {
        let w1 = wheel_element(1, ElimOrder::Leftmost).unwrap();
        let dl = ArrowDiagram::parse_line("H1 T1").unwrap();
        let dr = ArrowDiagram::parse_line("T1 H1").unwrap();
        assert_eq!(w1.terms.len(), 2);
        assert_eq!(w1.terms.get(&dl), Some(&rat(1)));
        assert_eq!(w1.terms.get(&dr), Some(&rat(-1)));
    }

    #[test]
    fn two_wheel_is_a_four_term_combination() {
        let w2 = wheel_element(2, ElimOrder::Leftmost).unwrap();
        assert_eq!(w2.terms.len(), 4);
        assert!(w2.terms.keys().all(|d| d.degree() == 2));
    }

    #[test]
    fn wheel_degree_is_k() {
        for k in 1..=4 {
            let j = wheel_jacobi(k);
            j.validate().unwrap();
            assert_eq!(j.degree(), k);
        }
    }

    #[test]
    fn two_wheel_is_nonzero_in_w_quotient() {
        let caps = EnumerationCaps::default();
        let q = QuotientSpace::new(Skeleton::LongLine, SpaceKind::W, 2, &caps).unwrap();
        let w2 = wheel_element(2, ElimOrder::Leftmost).unwrap();
        assert!(!q.is_zero_class(&w2).unwrap());
    }

    #[test]
    fn elimination_order_is_immaterial_in_the_quotient() {
        let caps = EnumerationCaps::default();
        for k in 2..=4usize {
            let a = wheel_element(k, ElimOrder::Leftmost).unwrap();
            let b = wheel_element(k, ElimOrder::Rightmost).unwrap();
            let q = QuotientSpace::new(Skeleton::LongLine, SpaceKind::W, k, &caps).unwrap();
            assert!(q.classes_equal(&a, &b).unwrap(), "wheel {k}");
        }
    }

    #[test]
    fn wheels_vanish_on_the_circle() {
        let caps = EnumerationCaps::default();
        for k in 1..=4usize {
            let w = wheel_element(k, ElimOrder::Leftmost).unwrap();
            let closed = w.close();
            let q = QuotientSpace::new(Skeleton::Circle, SpaceKind::W, k, &caps).unwrap();
            assert!(q.is_zero_class(&closed).unwrap(), "wheel {k} on the circle");
        }
    }

    /// AS at a hub vertex: swapping left and right negates the class.
    #[test]
    fn as_relation_holds_after_elimination() {
        let caps = EnumerationCaps::default();
        for k in 2..=3usize {
            let mut swapped = wheel_jacobi(k);
            let v = swapped.vertices[0];
            swapped.vertices[0] = JVertex {
                left: v.right,
                right: v.left,
                out: v.out,
            };
            let a = wheel_jacobi(k).stu_eliminate(ElimOrder::Leftmost).unwrap();
            let b = swapped.stu_eliminate(ElimOrder::Leftmost).unwrap();
            let q = QuotientSpace::new(Skeleton::LongLine, SpaceKind::W, k, &caps).unwrap();
            assert!(q.is_zero_class(&a.add(&b)).unwrap(), "AS at wheel {k}");
        }
    }

    /// IHX in the form [[x,y],z] = [[x,z],y] + [x,[y,z]] for tree diagrams
    /// with three skeleton tails and the root head on the skeleton.
    #[test]
    fn ihx_relation_holds_after_elimination() {
        let caps = EnumerationCaps::default();
        // tails at skeleton positions 0,1,2 and the head at position 3;
        // bracketing patterns built from two internal vertices
        let tree = |pattern: u8| -> JacobiDiagram {
            // edges: 0,1,2 = tails x,y,z; 3 = inner, 4 = root
            let (va, vb) = match pattern {
                // [[x,y],z]: inner = (x,y), root = (inner, z)
                0 => (
                    JVertex {
                        left: 0,
                        right: 1,
                        out: 3,
                    },
                    JVertex {
                        left: 3,
                        right: 2,
                        out: 4,
                    },
                ),
                // [[x,z],y]
                1 => (
                    JVertex {
                        left: 0,
                        right: 2,
                        out: 3,
                    },
                    JVertex {
                        left: 3,
                        right: 1,
                        out: 4,
                    },
                ),
                // [x,[y,z]]
                _ => (
                    JVertex {
                        left: 1,
                        right: 2,
                        out: 3,
                    },
                    JVertex {
                        left: 0,
                        right: 3,
                        out: 4,
                    },
                ),
            };
            JacobiDiagram {
                n_edges: 5,
                skel: vec![
                    (0, EndKind::Tail),
                    (1, EndKind::Tail),
                    (2, EndKind::Tail),
                    (4, EndKind::Head),
                ],
                vertices: vec![va, vb],
            }
        };
        let a = tree(0).stu_eliminate(ElimOrder::Leftmost).unwrap();
        let b = tree(1).stu_eliminate(ElimOrder::Leftmost).unwrap();
        let c = tree(2).stu_eliminate(ElimOrder::Leftmost).unwrap();
        let q = QuotientSpace::new(Skeleton::LongLine, SpaceKind::W, 3, &caps).unwrap();
        let combo = a.add(&b.neg()).add(&c.neg());
        assert!(q.is_zero_class(&combo).unwrap());
    }
}
