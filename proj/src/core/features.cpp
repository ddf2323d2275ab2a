#include "core/features.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/fft.hpp"

namespace qbh {

const char* feature_kind_name(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::MFCC: return "MFCC";
        case FeatureKind::LPC: return "LPC";
        case FeatureKind::LPCC: return "LPCC";
    }
    return "?";
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "MFCC" || name == "mfcc") return FeatureKind::MFCC;
    if (name == "LPC" || name == "lpc") return FeatureKind::LPC;
    if (name == "LPCC" || name == "lpcc") return FeatureKind::LPCC;
    throw argument_error("unknown feature kind: " + name + " (expected MFCC, LPC or LPCC)");
}

void FrameConfig::validate() const {
    if (sample_rate_hz <= 0) throw config_error("sample rate must be positive");
    if (hop <= 0 || hop > frame_len) throw config_error("require 0 < hop <= frame_len");
    const double ms = 1000.0 * frame_len / sample_rate_hz;
    if (ms < 10.0 || ms > 30.0)
        throw config_error("frame length " + std::to_string(frame_len) +
                           " is outside the 10-30 ms range at " +
                           std::to_string(sample_rate_hz) + " Hz");
    if (pre_emphasis_alpha < 0.0 || pre_emphasis_alpha >= 1.0)
        throw config_error("pre-emphasis alpha must be in [0, 1)");
    if (!is_power_of_two(static_cast<size_t>(fft_size)))
        throw config_error("fft size must be a power of two");
    if (fft_size < frame_len) throw config_error("fft size must cover a frame");
    if (num_mel_filters < 2) throw config_error("need at least 2 mel filters");
    if (num_ceps < 1 || num_ceps > num_mel_filters)
        throw config_error("num_ceps must be in [1, num_mel_filters]");
    if (lpc_order < 1 || lpc_order >= frame_len) throw config_error("bad LPC order");
    if (lpc_retained < 1 || lpc_retained > lpc_order) throw config_error("bad lpc_retained");
    if (lpcc_count < lpcc_retained || lpcc_retained < 1) throw config_error("bad LPCC counts");
}

std::vector<double> pre_emphasize(const std::vector<double>& signal, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) throw argument_error("pre-emphasis alpha must be in [0, 1)");
    std::vector<double> y(signal.size());
    if (signal.empty()) return y;
    y[0] = signal[0];
    for (size_t n = 1; n < signal.size(); ++n) y[n] = signal[n] - alpha * signal[n - 1];
    return y;
}

std::vector<std::vector<double>> frame_signal(const std::vector<double>& signal,
                                              const FrameConfig& config) {
    if (signal.empty()) throw argument_error("cannot frame an empty signal");
    const size_t flen = static_cast<size_t>(config.frame_len);
    const size_t hop = static_cast<size_t>(config.hop);
    std::vector<std::vector<double>> frames;
    if (signal.size() < flen) {
        std::vector<double> f(flen, 0.0);
        std::copy(signal.begin(), signal.end(), f.begin());
        frames.push_back(std::move(f));
        return frames;
    }
    for (size_t start = 0; start + flen <= signal.size(); start += hop)
        frames.emplace_back(signal.begin() + start, signal.begin() + start + flen);
    return frames;
}

std::vector<double> hamming_window(int n) {
    if (n < 2) throw argument_error("window length must be >= 2");
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (n - 1));
    return w;
}

std::vector<double> dft_magnitude(const std::vector<double>& frame, size_t fft_size) {
    auto spec = fft_real(frame, fft_size);
    std::vector<double> mag(fft_size / 2 + 1);
    for (size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(spec[k]);
    return mag;
}

double hz_to_mel(double f) {
    if (f < 0.0) throw argument_error("frequency must be non-negative");
    return 2595.0 * std::log10(1.0 + f / 700.0);
}

double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank build_mel_filterbank(int num_filters, int fft_size, int sample_rate_hz) {
    if (num_filters < 2) throw argument_error("need at least 2 filters");
    if (!is_power_of_two(static_cast<size_t>(fft_size)))
        throw argument_error("fft size must be a power of two");

    const int num_bins = fft_size / 2 + 1;
    const double mel_max = hz_to_mel(sample_rate_hz / 2.0);
    std::vector<int> bin(num_filters + 2);
    for (int i = 0; i < num_filters + 2; ++i) {
        const double mel = mel_max * i / (num_filters + 1);
        const double hz = mel_to_hz(mel);
        bin[i] = static_cast<int>(std::lround(hz * fft_size / sample_rate_hz));
        bin[i] = std::min(bin[i], fft_size / 2);
    }
    for (int i = 1; i < num_filters + 2; ++i)
        if (bin[i] <= bin[i - 1])
            throw config_error("mel filter boundaries collapse onto the same FFT bin; "
                               "reduce the filter count or raise the FFT size");

    MelFilterbank bank;
    bank.num_filters = num_filters;
    bank.fft_size = fft_size;
    bank.sample_rate_hz = sample_rate_hz;
    bank.weights.assign(num_filters, std::vector<double>(num_bins, 0.0));
    for (int m = 0; m < num_filters; ++m) {
        const int lo = bin[m], center = bin[m + 1], hi = bin[m + 2];
        for (int k = lo; k <= center; ++k)
            bank.weights[m][k] = static_cast<double>(k - lo) / (center - lo);
        for (int k = center; k <= hi; ++k)
            bank.weights[m][k] = static_cast<double>(hi - k) / (hi - center);
        bank.weights[m][center] = 1.0;
    }
    return bank;
}

double frame_energy(const std::vector<double>& frame) {
    double e = 0.0;
    for (double x : frame) e += x * x;
    return e;
}

std::vector<double> mfcc_frame(const std::vector<double>& frame, const MelFilterbank& bank,
                               int num_ceps) {
    if (num_ceps > bank.num_filters)
        throw argument_error("num_ceps exceeds filter count");
    const auto mag = dft_magnitude(frame, static_cast<size_t>(bank.fft_size));
    const int m_count = bank.num_filters;
    std::vector<double> log_e(m_count);
    for (int m = 0; m < m_count; ++m) {
        double e = 0.0;
        for (size_t k = 0; k < mag.size(); ++k)
            e += bank.weights[m][k] * mag[k] * mag[k];
        log_e[m] = std::log(std::max(e, kLogFloor));
    }
    std::vector<double> ceps(num_ceps);
    for (int j = 1; j <= num_ceps; ++j) {
        double c = 0.0;
        for (int m = 0; m < m_count; ++m)
            c += log_e[m] * std::cos(M_PI * j * (m + 0.5) / m_count);
        ceps[j - 1] = c;
    }
    return ceps;
}

std::vector<std::vector<double>> delta_features(const std::vector<std::vector<double>>& coeffs) {
    const int frames = static_cast<int>(coeffs.size());
    std::vector<std::vector<double>> out(frames);
    for (int t = 0; t < frames; ++t) {
        const auto& prev = coeffs[std::max(t - 1, 0)];
        const auto& next = coeffs[std::min(t + 1, frames - 1)];
        out[t].resize(coeffs[t].size());
        for (size_t d = 0; d < coeffs[t].size(); ++d)
            out[t][d] = 0.5 * (next[d] - prev[d]);
    }
    return out;
}

std::vector<double> autocorrelation(const std::vector<double>& frame, int max_lag) {
    const int n = static_cast<int>(frame.size());
    if (max_lag >= n) throw argument_error("max_lag must be less than the frame length");
    std::vector<double> r(max_lag + 1, 0.0);
    for (int i = 0; i <= max_lag; ++i) {
        double acc = 0.0;
        for (int t = 0; t + i < n; ++t) acc += frame[t] * frame[t + i];
        r[i] = acc / (n - 1);
    }
    return r;
}

LpcResult lpc(const std::vector<double>& frame, int order) {
    if (order < 1) throw argument_error("LPC order must be >= 1");
    if (static_cast<int>(frame.size()) <= order)
        throw argument_error("frame length must exceed the LPC order");

    const auto r = autocorrelation(frame, order);
    LpcResult result;
    result.order = order;
    result.coefficients.assign(order, 0.0);
    if (r[0] == 0.0) {
        result.degenerate = true;
        result.gain = 0.0;
        return result;
    }

    // Levinson-Durbin recursion on the Toeplitz normal equations.
    std::vector<double> a(order, 0.0);
    double err = r[0];
    for (int m = 1; m <= order; ++m) {
        double acc = r[m];
        for (int k = 1; k < m; ++k) acc -= a[k - 1] * r[m - k];
        if (err <= 0.0)
            throw Error(ErrorKind::Conditioning, "LPC normal equations are numerically singular");
        const double k_m = acc / err;
        std::vector<double> a_new(a);
        a_new[m - 1] = k_m;
        for (int k = 1; k < m; ++k) a_new[k - 1] = a[k - 1] - k_m * a[m - 1 - k];
        a = std::move(a_new);
        err *= (1.0 - k_m * k_m);
    }
    result.coefficients = a;
    result.gain = std::max(err, 0.0);
    return result;
}

std::vector<double> lpcc(const LpcResult& model, int cepstra_count) {
    const int p = model.order;
    const auto& a = model.coefficients;
    std::vector<double> c(cepstra_count + 1, 0.0);
    c[0] = (model.gain > 0.0) ? std::log(model.gain) : std::log(kLogFloor);
    for (int m = 1; m <= cepstra_count; ++m) {
        double acc = (m <= p) ? a[m - 1] : 0.0;
        for (int k = 1; k < m; ++k) {
            const int j = m - k;
            if (j >= 1 && j <= p)
                acc += (static_cast<double>(k) / m) * c[k] * a[j - 1];
        }
        c[m] = acc;
    }
    return c;
}

namespace {

std::vector<float> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<float> flat;
    if (rows.empty()) return flat;
    flat.reserve(rows.size() * rows[0].size());
    for (const auto& row : rows)
        for (double v : row) flat.push_back(static_cast<float>(v));
    return flat;
}

}  // namespace

FeatureSequence extract_features(const AudioClip& clip, FeatureKind kind,
                                 const FrameConfig& config) {
    config.validate();
    if (!clip.is_mono())
        throw config_error("feature extraction expects a mono clip; downmix first");
    if (clip.sample_rate_hz != config.sample_rate_hz)
        throw config_error("clip is at " + std::to_string(clip.sample_rate_hz) +
                           " Hz but the config expects " + std::to_string(config.sample_rate_hz) +
                           " Hz; resample first");

    const auto emphasized = pre_emphasize(clip.channels[0], config.pre_emphasis_alpha);
    const auto frames = frame_signal(emphasized, config);
    const auto window = hamming_window(config.frame_len);

    std::vector<std::vector<double>> rows;
    rows.reserve(frames.size());

    if (kind == FeatureKind::MFCC) {
        const auto bank = build_mel_filterbank(config.num_mel_filters, config.fft_size,
                                               config.sample_rate_hz);
        std::vector<std::vector<double>> base;
        for (const auto& frame : frames) {
            std::vector<double> windowed(frame.size());
            for (size_t n = 0; n < frame.size(); ++n) windowed[n] = frame[n] * window[n];
            auto ceps = mfcc_frame(windowed, bank, config.num_ceps);
            if (config.extended_mfcc)
                ceps.push_back(std::log(std::max(frame_energy(frame), kLogFloor)));
            base.push_back(std::move(ceps));
        }
        if (config.extended_mfcc) {
            const auto d1 = delta_features(base);
            const auto d2 = delta_features(d1);
            for (size_t t = 0; t < base.size(); ++t) {
                auto row = base[t];
                row.insert(row.end(), d1[t].begin(), d1[t].end());
                row.insert(row.end(), d2[t].begin(), d2[t].end());
                rows.push_back(std::move(row));
            }
        } else {
            rows = base;
        }
    } else {
        for (const auto& frame : frames) {
            std::vector<double> windowed(frame.size());
            for (size_t n = 0; n < frame.size(); ++n) windowed[n] = frame[n] * window[n];
            const auto model = lpc(windowed, config.lpc_order);
            if (kind == FeatureKind::LPC) {
                rows.emplace_back(model.coefficients.begin(),
                                  model.coefficients.begin() + config.lpc_retained);
            } else {
                const auto c = lpcc(model, config.lpcc_count);
                rows.emplace_back(c.begin() + 1, c.begin() + 1 + config.lpcc_retained);
            }
        }
    }

    FeatureSequence seq;
    seq.kind = kind;
    seq.config = config;
    seq.frames = static_cast<int>(rows.size());
    seq.dim = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    seq.matrix = flatten(rows);
    return seq;
}

}  // namespace qbh
