use std::collections::BTreeSet;

use crate::metrics::Metric;
use crate::prioritize::RankingTable;

/// One row per file of interest, one column per canonical metric present
/// in `rankings`; each cell is the file's dense rank, empty when the file
/// is not in the graph.
pub fn export_radar_csv(rankings: &[RankingTable], foi: &BTreeSet<String>) -> Vec<u8> {
    let columns: Vec<&RankingTable> = Metric::ALL
        .iter()
        .filter_map(|m| rankings.iter().find(|t| t.metric_name == m.as_str()))
        .collect();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["file".to_string()];
    header.extend(columns.iter().map(|t| t.metric_name.clone()));
    writer.write_record(&header).expect("in-memory csv write");
    for file in foi {
        let mut row = vec![file.clone()];
        row.extend(
            columns
                .iter()
                .map(|t| t.rank_of(file).map(|r| r.to_string()).unwrap_or_default()),
        );
        writer.write_record(&row).expect("in-memory csv write");
    }
    writer.into_inner().expect("in-memory csv flush")
}
