/// Lays (access, burst) pairs back to back into a window and returns
/// delivered bits per µs of window. `rate(x)` is the sustained rate of bursts
/// capped at `x`, charged over the access time plus the burst.
pub fn pack<F: FnMut(f64) -> f64>(window: f64, txop: f64, t_cax: f64, mut rate: F) -> f64 {
    if window <= 0.0 {
        return 0.0;
    }
    let mut t = 0.0;
    let mut bits = 0.0;
    loop {
        let left = window - t;
        if left >= t_cax + txop {
            bits += rate(txop) * (t_cax + txop);
            t += t_cax + txop;
        } else {
            if left > t_cax {
                bits += rate(left - t_cax) * left;
            }
            break;
        }
    }
    bits / window
}
