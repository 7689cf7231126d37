use std::fmt::Write;

use super::format_number;
use crate::graph::VdfGraph;
use crate::metrics::MetricVector;

pub(crate) fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn metric_key(name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    format!("m_{clean}")
}

/// Directed GraphML with the file name and one numeric attribute per
/// metric on every node, and weight / severity_weight / vuln_count on
/// every edge.
pub fn export_graphml(g: &VdfGraph, metrics: &[MetricVector]) -> Vec<u8> {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    s.push_str("  <key id=\"file\" for=\"node\" attr.name=\"file\" attr.type=\"string\"/>\n");
    for m in metrics {
        let _ = writeln!(
            s,
            "  <key id=\"{}\" for=\"node\" attr.name=\"{}\" attr.type=\"double\"/>",
            metric_key(&m.name),
            escape_xml(&m.name)
        );
    }
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    s.push_str(
        "  <key id=\"severity_weight\" for=\"edge\" attr.name=\"severity_weight\" attr.type=\"double\"/>\n",
    );
    s.push_str("  <key id=\"vuln_count\" for=\"edge\" attr.name=\"vuln_count\" attr.type=\"int\"/>\n");
    s.push_str("  <graph id=\"vdf\" edgedefault=\"directed\">\n");
    for v in g.nodes() {
        let _ = write!(
            s,
            "    <node id=\"n{}\"><data key=\"file\">{}</data>",
            v.index(),
            escape_xml(g.file(v))
        );
        for m in metrics {
            let value = m.value_of(g.file(v)).unwrap_or(0.0);
            let _ = write!(s, "<data key=\"{}\">{}</data>", metric_key(&m.name), format_number(value));
        }
        s.push_str("</node>\n");
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(
            s,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data>\
             <data key=\"severity_weight\">{}</data><data key=\"vuln_count\">{}</data></edge>",
            e.from.index(),
            e.to.index(),
            format_number(e.weight),
            format_number(e.severity_weight),
            e.vuln_ids.len()
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s.into_bytes()
}
