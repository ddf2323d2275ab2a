#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/audio.hpp"

namespace qbh {

enum class FeatureKind { MFCC, LPC, LPCC };

const char* feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

// Frame-level analysis parameters. Defaults are 25 ms frames with a
// 10 ms hop at 8 kHz.
struct FrameConfig {
    int frame_len = 200;
    int hop = 80;
    double pre_emphasis_alpha = 0.97;
    int sample_rate_hz = 8000;

    int num_mel_filters = 26;
    int fft_size = 256;
    int num_ceps = 12;       // retained MFCC coefficients
    int lpc_order = 14;
    int lpc_retained = 12;   // predictor coefficients kept in the feature vector
    int lpcc_count = 21;     // cepstra computed before truncation to lpcc_retained
    int lpcc_retained = 12;
    bool extended_mfcc = false;  // 12 cepstra + energy + deltas + double deltas (39-dim)

    void validate() const;  // throws on out-of-range values
    bool operator==(const FrameConfig&) const = default;
};

// Log energies are floored at this value before taking ln, so silent
// frames produce finite, deterministic cepstra.
constexpr double kLogFloor = 1e-10;

struct MelFilterbank {
    int num_filters = 0;
    int fft_size = 0;
    int sample_rate_hz = 0;
    // num_filters rows of (fft_size/2 + 1) weights
    std::vector<std::vector<double>> weights;
};

struct LpcResult {
    std::vector<double> coefficients;  // a_1 .. a_p
    double gain = 0.0;                 // final prediction error, >= 0
    int order = 0;
    bool degenerate = false;           // identically-zero input frame
};

struct FeatureSequence {
    FeatureKind kind = FeatureKind::MFCC;
    int frames = 0;
    int dim = 0;
    std::vector<float> matrix;  // row-major, frames x dim
    FrameConfig config;

    float at(int t, int d) const { return matrix[static_cast<size_t>(t) * dim + d]; }
    const float* row(int t) const { return matrix.data() + static_cast<size_t>(t) * dim; }
};

std::vector<double> pre_emphasize(const std::vector<double>& signal, double alpha);

std::vector<std::vector<double>> frame_signal(const std::vector<double>& signal,
                                              const FrameConfig& config);

// w[n] = 0.54 - 0.46 cos(2 pi n / (N-1))
std::vector<double> hamming_window(int n);

// |DFT| of the zero-padded frame, bins 0 .. fft_size/2.
std::vector<double> dft_magnitude(const std::vector<double>& frame, size_t fft_size);

// 2595 * log10(1 + f/700)
double hz_to_mel(double f);
double mel_to_hz(double mel);

MelFilterbank build_mel_filterbank(int num_filters, int fft_size, int sample_rate_hz);

double frame_energy(const std::vector<double>& frame);

// Log mel energies decorrelated by a plain DCT-II cosine sum; returns
// c_1 .. c_num_ceps (c_0 excluded).
std::vector<double> mfcc_frame(const std::vector<double>& frame, const MelFilterbank& bank,
                               int num_ceps);

// d(t) = (c(t+1) - c(t-1)) / 2 with edge replication.
std::vector<std::vector<double>> delta_features(const std::vector<std::vector<double>>& coeffs);

// R(i) = 1/(N-1) * sum_n y[n] y[n+i]
std::vector<double> autocorrelation(const std::vector<double>& frame, int max_lag);

// Levinson-Durbin solve of the autocorrelation normal equations.
LpcResult lpc(const std::vector<double>& frame, int order);

// Cepstral recursion from predictor coefficients and gain; returns c_0 .. c_Q.
std::vector<double> lpcc(const LpcResult& model, int cepstra_count);

FeatureSequence extract_features(const AudioClip& clip, FeatureKind kind,
                                 const FrameConfig& config);

}  // namespace qbh
