/// Round-trip-exact scientific notation used for every exported number.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [1.0 / 3.0, 1e-300, 5.0 / 3.0, 0.0, 123456.789] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(1.0 / 12.0), "8.3333333333333329e-2");
    }
}
