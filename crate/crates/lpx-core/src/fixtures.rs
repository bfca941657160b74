//! Built-in named graphs used by the verification battery and the tests.

use crate::graph::Graph;

/// Complete graph on 4 vertices (3-regular, q = 2).
pub fn k4() -> Graph {
    Graph::from_edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// Petersen graph: outer 5-cycle, inner pentagram, spokes. 3-regular,
/// spectrum {3, 1^5, -2^4}.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5u64 {
        edges.push((i, (i + 1) % 5)); // outer cycle
        edges.push((5 + i, 5 + (i + 2) % 5)); // pentagram
        edges.push((i, 5 + i)); // spokes
    }
    Graph::from_edges(&edges).unwrap()
}

/// Circular ladder `C_k x K_2` (prism over a k-cycle), 3-regular on 2k
/// vertices.
pub fn circular_ladder(k: u64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..k {
        edges.push((i, (i + 1) % k));
        edges.push((k + i, k + (i + 1) % k));
        edges.push((i, k + i));
    }
    Graph::from_edges(&edges).unwrap()
}

/// The 32-vertex circular ladder; 3-regular but not Ramanujan.
pub fn cl16() -> Graph {
    circular_ladder(16)
}

/// Complete bipartite graph K_{2,3}; biregular with (q0, q1) = (1, 2).
pub fn k23() -> Graph {
    Graph::from_edges(&[(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)]).unwrap()
}

/// K4 with every edge subdivided once: 10 vertices, biregular (1, 2),
/// and a biregular Ramanujan graph.
pub fn subdivided_k4() -> Graph {
    let base = [(0u64, 1u64), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut edges = Vec::new();
    for (i, &(u, v)) in base.iter().enumerate() {
        let w = 4 + i as u64;
        edges.push((u, w));
        edges.push((w, v));
    }
    Graph::from_edges(&edges).unwrap()
}

/// The fixture set driven by `lpx verify`, with stable names.
pub fn all() -> Vec<(&'static str, Graph)> {
    vec![
        ("k4", k4()),
        ("petersen", petersen()),
        ("cl16", cl16()),
        ("k23", k23()),
        ("subdivided_k4", subdivided_k4()),
    ]
}
