pub mod ber;
pub mod mac;
pub mod snr;
pub mod topology;

/// CSV rendering of an experiment's result table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.header.len() + 64 * self.rows.len());
        s.push_str(self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}
