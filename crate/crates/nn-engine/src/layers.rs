//! Layer kernels: forward and exact backward passes.
//!
//! Activations are `[batch][plane][h][w]` row-major. Convolutions run along
//! h only (kernel width 1), so the inner loops are contiguous AXPY-style
//! sweeps of length `h_out * w`. Parallelism is over disjoint per-sample or
//! per-plane slices with fixed-order reductions, keeping results
//! bit-reproducible regardless of thread scheduling.

use rayon::prelude::*;

/// Epsilon added to batch-norm variances.
pub const BN_EPS: f64 = 1e-5;

/// One activation tensor for a whole batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Act {
    pub batch: usize,
    pub planes: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Act {
    pub fn zeros(batch: usize, planes: usize, h: usize, w: usize) -> Act {
        Act {
            batch,
            planes,
            h,
            w,
            data: vec![0.0; batch * planes * h * w],
        }
    }

    /// Values per sample.
    pub fn sample_len(&self) -> usize {
        self.planes * self.h * self.w
    }
}

// ---------------------------------------------------------------- conv

/// One sample's convolution with the kernel taps fused into a single sweep;
/// `KH` is monomorphized so the tap loop unrolls.
fn conv_sample<const KH: usize>(
    o: &mut [f64],
    inp: &[f64],
    weight: &[f64],
    bias: &[f64],
    out_planes: usize,
    pin: usize,
    h: usize,
    w: usize,
) {
    let hout = h - KH + 1;
    for po in 0..out_planes {
        let o_plane = &mut o[po * hout * w..(po + 1) * hout * w];
        o_plane.fill(bias[po]);
        for pi in 0..pin {
            let i_plane = &inp[pi * h * w..(pi + 1) * h * w];
            let wrow = &weight[(po * pin + pi) * KH..(po * pin + pi) * KH + KH];
            let mut taps = [0.0f64; KH];
            taps.copy_from_slice(wrow);
            for (x, ov) in o_plane.iter_mut().enumerate() {
                let mut acc = *ov;
                for dk in 0..KH {
                    acc += taps[dk] * i_plane[x + dk * w];
                }
                *ov = acc;
            }
        }
    }
}

pub fn conv_forward(input: &Act, weight: &[f64], bias: &[f64], out_planes: usize, kh: usize) -> Act {
    let (pin, h, w) = (input.planes, input.h, input.w);
    let hout = h - kh + 1;
    let in_len = input.sample_len();
    let out_len = out_planes * hout * w;
    let mut out = Act::zeros(input.batch, out_planes, hout, w);

    out.data
        .par_chunks_mut(out_len)
        .zip(input.data.par_chunks(in_len))
        .for_each(|(o, inp)| match kh {
            1 => conv_sample::<1>(o, inp, weight, bias, out_planes, pin, h, w),
            2 => conv_sample::<2>(o, inp, weight, bias, out_planes, pin, h, w),
            5 => conv_sample::<5>(o, inp, weight, bias, out_planes, pin, h, w),
            _ => conv_sample_generic(o, inp, weight, bias, out_planes, pin, h, w, kh),
        });
    out
}

#[allow(clippy::too_many_arguments)]
fn conv_sample_generic(
    o: &mut [f64],
    inp: &[f64],
    weight: &[f64],
    bias: &[f64],
    out_planes: usize,
    pin: usize,
    h: usize,
    w: usize,
    kh: usize,
) {
    let hout = h - kh + 1;
    for po in 0..out_planes {
        let o_plane = &mut o[po * hout * w..(po + 1) * hout * w];
        o_plane.fill(bias[po]);
        for pi in 0..pin {
            let i_plane = &inp[pi * h * w..(pi + 1) * h * w];
            for dk in 0..kh {
                let wgt = weight[(po * pin + pi) * kh + dk];
                let shifted = &i_plane[dk * w..dk * w + hout * w];
                for (ov, iv) in o_plane.iter_mut().zip(shifted) {
                    *ov += wgt * iv;
                }
            }
        }
    }
}

pub struct ConvGrads {
    pub d_weight: Vec<f64>,
    pub d_bias: Vec<f64>,
    pub d_input: Act,
}

/// Per-tap weight-gradient accumulation over one (plane, sample) pair.
fn conv_dw_taps<const KH: usize>(dw: &mut [f64], i_plane: &[f64], go: &[f64], w: usize) {
    let mut acc = [0.0f64; KH];
    for (x, &gv) in go.iter().enumerate() {
        for dk in 0..KH {
            acc[dk] += i_plane[x + dk * w] * gv;
        }
    }
    for dk in 0..KH {
        dw[dk] += acc[dk];
    }
}

pub fn conv_backward(
    input: &Act,
    d_out: &Act,
    weight: &[f64],
    out_planes: usize,
    kh: usize,
) -> ConvGrads {
    let (pin, h, w) = (input.planes, input.h, input.w);
    let hout = h - kh + 1;
    let in_len = input.sample_len();
    let out_len = d_out.sample_len();
    let batch = input.batch;

    // Input gradient: per-sample disjoint writes.
    let mut d_input = Act::zeros(batch, pin, h, w);
    d_input
        .data
        .par_chunks_mut(in_len)
        .zip(d_out.data.par_chunks(out_len))
        .for_each(|(di, go)| {
            for po in 0..out_planes {
                let g_plane = &go[po * hout * w..(po + 1) * hout * w];
                for pi in 0..pin {
                    let di_plane = &mut di[pi * h * w..(pi + 1) * h * w];
                    for dk in 0..kh {
                        let wgt = weight[(po * pin + pi) * kh + dk];
                        let target = &mut di_plane[dk * w..dk * w + hout * w];
                        for (dv, gv) in target.iter_mut().zip(g_plane) {
                            *dv += wgt * gv;
                        }
                    }
                }
            }
        });

    // Weight/bias gradients: one output plane per task, batch summed in
    // index order inside the task; all taps accumulate in one sweep.
    let per_po: Vec<(Vec<f64>, f64)> = (0..out_planes)
        .into_par_iter()
        .map(|po| {
            let mut dw = vec![0.0f64; pin * kh];
            let mut db = 0.0f64;
            for b in 0..batch {
                let inp = &input.data[b * in_len..(b + 1) * in_len];
                let go = &d_out.data[b * out_len + po * hout * w..b * out_len + (po + 1) * hout * w];
                db += go.iter().sum::<f64>();
                for pi in 0..pin {
                    let i_plane = &inp[pi * h * w..(pi + 1) * h * w];
                    match kh {
                        2 => conv_dw_taps::<2>(&mut dw[pi * kh..pi * kh + kh], i_plane, go, w),
                        5 => conv_dw_taps::<5>(&mut dw[pi * kh..pi * kh + kh], i_plane, go, w),
                        _ => {
                            for dk in 0..kh {
                                let shifted = &i_plane[dk * w..dk * w + hout * w];
                                let mut acc = 0.0;
                                for (iv, gv) in shifted.iter().zip(go) {
                                    acc += iv * gv;
                                }
                                dw[pi * kh + dk] += acc;
                            }
                        }
                    }
                }
            }
            (dw, db)
        })
        .collect();

    let mut d_weight = vec![0.0f64; out_planes * pin * kh];
    let mut d_bias = vec![0.0f64; out_planes];
    for (po, (dw, db)) in per_po.into_iter().enumerate() {
        d_weight[po * pin * kh..(po + 1) * pin * kh].copy_from_slice(&dw);
        d_bias[po] = db;
    }

    ConvGrads {
        d_weight,
        d_bias,
        d_input,
    }
}

// ---------------------------------------------------------------- batchnorm

pub struct BnCache {
    /// Normalized pre-affine values.
    pub xhat: Vec<f64>,
    pub inv_std: Vec<f64>,
    /// Statistics actually used (batch stats in train mode, running stats
    /// otherwise).
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    /// Whether batch statistics were used (and should feed running stats).
    pub used_batch_stats: bool,
}

/// Batch normalization over (batch, h, w) per plane.
#[allow(clippy::too_many_arguments)]
pub fn bn_forward(
    input: &Act,
    gamma: &[f64],
    beta: &[f64],
    running_mean: &[f64],
    running_var: &[f64],
    use_batch_stats: bool,
) -> (Act, BnCache) {
    let (planes, h, w) = (input.planes, input.h, input.w);
    let plane_sz = h * w;
    let sample_len = input.sample_len();
    let n = input.batch * plane_sz;

    let (mean, var) = if use_batch_stats {
        let mut mean = vec![0.0f64; planes];
        let mut var = vec![0.0f64; planes];
        for p in 0..planes {
            let mut s = 0.0;
            for b in 0..input.batch {
                let base = b * sample_len + p * plane_sz;
                s += input.data[base..base + plane_sz].iter().sum::<f64>();
            }
            mean[p] = s / n as f64;
            let mut sq = 0.0;
            for b in 0..input.batch {
                let base = b * sample_len + p * plane_sz;
                for v in &input.data[base..base + plane_sz] {
                    let d = v - mean[p];
                    sq += d * d;
                }
            }
            var[p] = sq / n as f64;
        }
        (mean, var)
    } else {
        (running_mean.to_vec(), running_var.to_vec())
    };

    let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + BN_EPS).sqrt()).collect();

    let mut out = Act::zeros(input.batch, planes, h, w);
    let mut xhat = vec![0.0f64; input.data.len()];
    out.data
        .par_chunks_mut(sample_len)
        .zip(xhat.par_chunks_mut(sample_len))
        .zip(input.data.par_chunks(sample_len))
        .for_each(|((o, xh), inp)| {
            for p in 0..planes {
                let g = gamma[p];
                let bta = beta[p];
                let m = mean[p];
                let is = inv_std[p];
                for k in p * plane_sz..(p + 1) * plane_sz {
                    let v = (inp[k] - m) * is;
                    xh[k] = v;
                    o[k] = g * v + bta;
                }
            }
        });

    (
        out,
        BnCache {
            xhat,
            inv_std,
            mean,
            var,
            used_batch_stats: use_batch_stats,
        },
    )
}

pub struct BnGrads {
    pub d_gamma: Vec<f64>,
    pub d_beta: Vec<f64>,
    pub d_input: Act,
}

pub fn bn_backward(cache: &BnCache, d_out: &Act, gamma: &[f64]) -> BnGrads {
    let (planes, h, w) = (d_out.planes, d_out.h, d_out.w);
    let plane_sz = h * w;
    let sample_len = d_out.sample_len();
    let batch = d_out.batch;
    let n = (batch * plane_sz) as f64;

    // Plane-level reductions in fixed order.
    let sums: Vec<(f64, f64)> = (0..planes)
        .into_par_iter()
        .map(|p| {
            let mut s_dy = 0.0;
            let mut s_dy_xhat = 0.0;
            for b in 0..batch {
                let base = b * sample_len + p * plane_sz;
                for k in base..base + plane_sz {
                    s_dy += d_out.data[k];
                    s_dy_xhat += d_out.data[k] * cache.xhat[k];
                }
            }
            (s_dy, s_dy_xhat)
        })
        .collect();

    let mut d_input = Act::zeros(batch, planes, h, w);
    d_input
        .data
        .par_chunks_mut(sample_len)
        .zip(d_out.data.par_chunks(sample_len))
        .enumerate()
        .for_each(|(b, (di, go))| {
            for p in 0..planes {
                let (s_dy, s_dy_xhat) = sums[p];
                let g = gamma[p];
                let is = cache.inv_std[p];
                for k in p * plane_sz..(p + 1) * plane_sz {
                    di[k] = if cache.used_batch_stats {
                        // Full train-mode backward through the batch stats.
                        g * is / n
                            * (n * go[k]
                                - s_dy
                                - cache.xhat[gk(b, k, sample_len)] * s_dy_xhat)
                    } else {
                        g * is * go[k]
                    };
                }
            }
        });

    let d_gamma: Vec<f64> = sums.iter().map(|&(_, s)| s).collect();
    let d_beta: Vec<f64> = sums.iter().map(|&(s, _)| s).collect();
    BnGrads {
        d_gamma,
        d_beta,
        d_input,
    }
}

#[inline]
fn gk(b: usize, k: usize, sample_len: usize) -> usize {
    b * sample_len + k
}

// ---------------------------------------------------------------- leaky relu

pub fn leaky_relu_forward(input: &Act, slope: f64) -> (Act, Vec<u8>) {
    let mut out = input.clone();
    let mut mask = vec![0u8; input.data.len()];
    out.data
        .par_chunks_mut(4096)
        .zip(mask.par_chunks_mut(4096))
        .for_each(|(chunk, mchunk)| {
            for (v, m) in chunk.iter_mut().zip(mchunk) {
                if *v > 0.0 {
                    *m = 1;
                } else {
                    *v *= slope;
                }
            }
        });
    (out, mask)
}

pub fn leaky_relu_backward(d_out: &Act, mask: &[u8], slope: f64) -> Act {
    let mut d_input = d_out.clone();
    d_input
        .data
        .par_chunks_mut(4096)
        .zip(mask.par_chunks(4096))
        .for_each(|(chunk, mchunk)| {
            for (v, &m) in chunk.iter_mut().zip(mchunk) {
                if m == 0 {
                    *v *= slope;
                }
            }
        });
    d_input
}

// ---------------------------------------------------------------- max pool

/// Max pooling over h with stride = kernel; ties pick the earliest index.
pub fn maxpool_forward(input: &Act, kh: usize) -> (Act, Vec<u8>) {
    let (planes, h, w) = (input.planes, input.h, input.w);
    let hout = h / kh;
    let in_len = input.sample_len();
    let out_len = planes * hout * w;
    let mut out = Act::zeros(input.batch, planes, hout, w);
    let mut argmax = vec![0u8; input.batch * out_len];

    out.data
        .par_chunks_mut(out_len)
        .zip(argmax.par_chunks_mut(out_len))
        .zip(input.data.par_chunks(in_len))
        .for_each(|((o, am), inp)| {
            for p in 0..planes {
                for ho in 0..hout {
                    for x in 0..w {
                        let mut best = inp[(p * h + ho * kh) * w + x];
                        let mut best_dk = 0u8;
                        for dk in 1..kh {
                            let v = inp[(p * h + ho * kh + dk) * w + x];
                            if v > best {
                                best = v;
                                best_dk = dk as u8;
                            }
                        }
                        o[(p * hout + ho) * w + x] = best;
                        am[(p * hout + ho) * w + x] = best_dk;
                    }
                }
            }
        });
    (out, argmax)
}

pub fn maxpool_backward(d_out: &Act, argmax: &[u8], in_h: usize, kh: usize) -> Act {
    let (planes, hout, w) = (d_out.planes, d_out.h, d_out.w);
    let out_len = d_out.sample_len();
    let in_len = planes * in_h * w;
    let mut d_input = Act::zeros(d_out.batch, planes, in_h, w);

    d_input
        .data
        .par_chunks_mut(in_len)
        .zip(d_out.data.par_chunks(out_len))
        .zip(argmax.par_chunks(out_len))
        .for_each(|((di, go), am)| {
            for p in 0..planes {
                for ho in 0..hout {
                    for x in 0..w {
                        let oi = (p * hout + ho) * w + x;
                        let hi = ho * kh + am[oi] as usize;
                        di[(p * in_h + hi) * w + x] += go[oi];
                    }
                }
            }
        });
    d_input
}

// ---------------------------------------------------------------- dense

pub fn dense_forward(input: &Act, weight: &[f64], bias: &[f64], outputs: usize) -> Act {
    let inputs = input.sample_len();
    let mut out = Act::zeros(input.batch, 1, 1, outputs);
    out.data
        .par_chunks_mut(outputs)
        .zip(input.data.par_chunks(inputs))
        .for_each(|(o, inp)| {
            for (oi, ov) in o.iter_mut().enumerate() {
                let row = &weight[oi * inputs..(oi + 1) * inputs];
                let mut acc = bias[oi];
                for (wv, iv) in row.iter().zip(inp) {
                    acc += wv * iv;
                }
                *ov = acc;
            }
        });
    out
}

pub struct DenseGrads {
    pub d_weight: Vec<f64>,
    pub d_bias: Vec<f64>,
    pub d_input: Act,
}

pub fn dense_backward(input: &Act, d_out: &Act, weight: &[f64], outputs: usize) -> DenseGrads {
    let inputs = input.sample_len();
    let batch = input.batch;

    let mut d_weight = vec![0.0f64; outputs * inputs];
    let mut d_bias = vec![0.0f64; outputs];
    for b in 0..batch {
        let inp = &input.data[b * inputs..(b + 1) * inputs];
        let go = &d_out.data[b * outputs..(b + 1) * outputs];
        for (oi, &g) in go.iter().enumerate() {
            d_bias[oi] += g;
            let row = &mut d_weight[oi * inputs..(oi + 1) * inputs];
            for (dw, iv) in row.iter_mut().zip(inp) {
                *dw += g * iv;
            }
        }
    }

    let mut d_input = Act::zeros(batch, input.planes, input.h, input.w);
    d_input
        .data
        .par_chunks_mut(inputs)
        .zip(d_out.data.par_chunks(outputs))
        .for_each(|(di, go)| {
            for (oi, &g) in go.iter().enumerate() {
                let row = &weight[oi * inputs..(oi + 1) * inputs];
                for (dv, wv) in di.iter_mut().zip(row) {
                    *dv += g * wv;
                }
            }
        });

    DenseGrads {
        d_weight,
        d_bias,
        d_input,
    }
}

// ---------------------------------------------------------------- softplus

pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn softplus_forward(input: &Act) -> Act {
    let mut out = input.clone();
    out.data.iter_mut().for_each(|v| *v = softplus(*v));
    out
}

pub fn softplus_backward(input: &Act, d_out: &Act) -> Act {
    let mut d_input = d_out.clone();
    for (dv, &x) in d_input.data.iter_mut().zip(&input.data) {
        *dv *= sigmoid(x);
    }
    d_input
}
