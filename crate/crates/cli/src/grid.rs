//! Parsers for the grid-shaped CLI flags.

/// Parses `start:step:end` into an inclusive probability grid.
pub fn parse_p_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("p-grid '{spec}' must be start:step:end"));
    }
    let parse = |what: &str, s: &str| -> Result<f64, String> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| format!("p-grid {what} '{s}': {e}"))
    };
    let start = parse("start", parts[0])?;
    let step = parse("step", parts[1])?;
    let end = parse("end", parts[2])?;
    if !step.is_finite() || step <= 0.0 {
        return Err(format!("p-grid step must be positive, got {step}"));
    }
    if start > end {
        return Err(format!("p-grid start {start} exceeds end {end}"));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let p = start + f64::from(i) * step;
        if p > end + step * 1e-9 {
            break;
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(format!("p-grid value {p} is outside (0, 1)"));
        }
        grid.push(p);
        i += 1;
    }
    if grid.is_empty() {
        return Err(format!("p-grid '{spec}' produced no points"));
    }
    Ok(grid)
}

/// Parses a comma list of target counts, each at least 2.
pub fn parse_r_list(spec: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let r: u32 = part
            .trim()
            .parse()
            .map_err(|e| format!("r value '{part}': {e}"))?;
        if r < 2 {
            return Err(format!("r must be at least 2, got {r}"));
        }
        out.push(r);
    }
    if out.is_empty() {
        return Err("empty r list".to_string());
    }
    Ok(out)
}
