//! Sieves for primes and the Möbius function.

pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn mobius_up_to(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    if n == 0 {
        return mu;
    }
    mu[0] = 0;
    for p in primes_up_to(n as u64) {
        let p = p as usize;
        for k in (p..=n).step_by(p) {
            mu[k] = -mu[k];
        }
        let pp = p * p;
        for k in (pp..=n).step_by(pp) {
            mu[k] = 0;
        }
    }
    mu
}
