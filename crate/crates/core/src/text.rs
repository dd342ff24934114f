/// Decimal text with 17 significant digits; parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// A scalar in a key/value report.
#[derive(Debug, Clone, PartialEq)]
pub enum KvValue {
    Str(String),
    Float(f64),
    Int(i64),
    Bool(bool),
}

impl KvValue {
    fn render(&self) -> String {
        match self {
            KvValue::Str(s) => toml::Value::String(s.clone()).to_string(),
            KvValue::Float(x) => fmt_f64(*x),
            KvValue::Int(i) => i.to_string(),
            KvValue::Bool(b) => b.to_string(),
        }
    }
}

impl From<&str> for KvValue {
    fn from(s: &str) -> Self {
        KvValue::Str(s.to_string())
    }
}

impl From<String> for KvValue {
    fn from(s: String) -> Self {
        KvValue::Str(s)
    }
}

impl From<f64> for KvValue {
    fn from(x: f64) -> Self {
        KvValue::Float(x)
    }
}

impl From<usize> for KvValue {
    fn from(i: usize) -> Self {
        KvValue::Int(i as i64)
    }
}

impl From<u64> for KvValue {
    fn from(i: u64) -> Self {
        // Seeds above i64::MAX keep their bits in a string.
        match i64::try_from(i) {
            Ok(v) => KvValue::Int(v),
            Err(_) => KvValue::Str(i.to_string()),
        }
    }
}

impl From<bool> for KvValue {
    fn from(b: bool) -> Self {
        KvValue::Bool(b)
    }
}

/// Ordered sections of key/value pairs, rendered as TOML.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDocument {
    sections: Vec<(String, Vec<(String, KvValue)>)>,
}

impl KvDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Vec<(String, KvValue)> {
        self.sections.push((name.to_string(), Vec::new()));
        &mut self.sections.last_mut().expect("just pushed").1
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (name, entries)) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in entries {
                out.push_str(&format!("{k} = {}\n", v.render()));
            }
        }
        out
    }
}

/// Appends `key = value` to a section.
pub fn put(entries: &mut Vec<(String, KvValue)>, key: &str, value: impl Into<KvValue>) {
    entries.push((key.to_string(), value.into()));
}
