//! Radix-2 number-theoretic transform over `Fp<P>`.

use super::field::Fp;

fn bit_reverse_permute<T>(a: &mut [T]) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
}

/// In-place transform: `a[i] <- sum_j a[j] * root^(i*j)`. `root` must have
/// multiplicative order exactly `a.len()`.
pub fn ntt_in_place<const P: u64>(a: &mut [Fp<P>], root: Fp<P>) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    bit_reverse_permute(a);
    // twiddles for the largest stage; smaller stages stride through them
    let half = n / 2;
    let mut tw = Vec::with_capacity(half);
    let mut w = Fp::<P>::ONE;
    for _ in 0..half {
        tw.push(w);
        w *= root;
    }
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let t = tw[k * step] * a[start + k + len / 2];
                let u = a[start + k];
                a[start + k] = u + t;
                a[start + k + len / 2] = u - t;
            }
        }
        len <<= 1;
    }
}

/// Inverse of [`ntt_in_place`] for the same `root`.
pub fn intt_in_place<const P: u64>(a: &mut [Fp<P>], root: Fp<P>) {
    let n = a.len();
    if n <= 1 {
        return;
    }
    let inv_root = root.inverse().expect("root of unity is nonzero");
    ntt_in_place(a, inv_root);
    let n_inv = Fp::<P>::new(n as u64).inverse().expect("n invertible");
    for x in a.iter_mut() {
        *x *= n_inv;
    }
}
