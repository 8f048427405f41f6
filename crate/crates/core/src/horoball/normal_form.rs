/// Shape of the two-vertical-segments-plus-one-horizontal geodesic between
/// `(p, l_u)` and `(q, l_v)` in the infinite horoball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalForm {
    pub distance: u32,
    /// Depth of the horizontal segment.
    pub turn_depth: u32,
    /// Number of horizontal edges.
    pub horizontal: u32,
}

/// Minimizes `(t - l_u) + (t - l_v) + ceil(d / 2^t)` over `t >= max(l_u, l_v)`.
///
/// Among optimal depths the deepest is returned: if the horizontal part at
/// depth `t` had 4 or more edges, depth `t + 1` would cost no more, so the
/// deepest optimum always has at most 3 horizontal edges.
pub fn normal_form(depth_u: u32, depth_v: u32, base_distance: u32) -> NormalForm {
    let d = u64::from(base_distance);
    let start = depth_u.max(depth_v);
    let mut best: Option<NormalForm> = None;
    let mut t = start;
    loop {
        let scale = 1u64 << t.min(62);
        let h = d.div_ceil(scale);
        let cost = u64::from(t - depth_u) + u64::from(t - depth_v) + h;
        if best.is_none_or(|b| cost <= u64::from(b.distance)) {
            best = Some(NormalForm {
                distance: cost as u32,
                turn_depth: t,
                horizontal: h as u32,
            });
        }
        // past this point h <= 1 and the vertical cost only grows
        if scale >= d {
            break;
        }
        t += 1;
    }
    best.expect("loop runs at least once")
}
