//! Resident-set-size readings from `/proc/self/status` (Linux only; `None` elsewhere).

fn status_field_kib(field: &str) -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status.lines().find_map(|line| {
        let rest = line.strip_prefix(field)?.strip_prefix(':')?;
        rest.trim().strip_suffix("kB")?.trim().parse().ok()
    })
}

/// Peak resident set size of this process in bytes.
pub fn peak_rss_bytes() -> Option<u64> {
    status_field_kib("VmHWM").map(|k| k * 1024)
}

pub fn current_rss_bytes() -> Option<u64> {
    status_field_kib("VmRSS").map(|k| k * 1024)
}

#[cfg(test)]
mod tests {
    #[test]
    #[cfg(target_os = "linux")]
    fn peak_at_least_current() {
        let cur = super::current_rss_bytes().unwrap();
        let peak = super::peak_rss_bytes().unwrap();
        assert!(peak >= cur && cur > 0);
    }
}
