use super::{ensure_flow, Arc, FlowAssignment, FlowError, MultiGraph};

/// Nowhere-zero 2-flow of a graph whose degrees are all even.
///
/// Closed trails are peeled off from the least vertex that still has unused
/// edges, always leaving by the least unused edge, and each trail is
/// oriented along the walk with value 1.
pub fn even_2_flow(g: &MultiGraph) -> Result<FlowAssignment, FlowError> {
    let degrees = g.degrees();
    if let Some(v) = (0..g.vertex_count()).find(|&v| degrees[v] % 2 == 1) {
        return Err(FlowError::OddDegree(v));
    }
    let inc = g.incidence();
    let mut cursor = vec![0usize; g.vertex_count()];
    let mut f = FlowAssignment::new();
    for start in 0..g.vertex_count() {
        loop {
            let mut at = start;
            let mut moved = false;
            loop {
                let next = loop {
                    match inc[at].get(cursor[at]) {
                        Some(e) if f.get(e.id).is_some() => cursor[at] += 1,
                        other => break other.copied(),
                    }
                };
                let Some(e) = next else { break };
                let to = e.other(at);
                f.insert(
                    e.id,
                    Arc {
                        tail: at,
                        head: to,
                        value: 1,
                    },
                );
                moved = true;
                at = to;
            }
            // even degrees force every maximal walk from `start` to close there
            debug_assert!(at == start);
            if !moved {
                break;
            }
        }
    }
    ensure_flow(g, &f, 2)?;
    Ok(f)
}
