#include "cstar/pairwise.hpp"

#include <algorithm>
#include <limits>

#include "cstar/error.hpp"

namespace cstar {

namespace {

constexpr int32_t kNegInf = std::numeric_limits<int32_t>::min() / 4;
constexpr int64_t kScoreLimit = std::numeric_limits<int32_t>::max() / 4;

// traceback byte for global DP
constexpr uint8_t kFromDiag = 0;
constexpr uint8_t kFromUp = 1;
constexpr uint8_t kFromLeft = 2;
constexpr uint8_t kSourceMask = 0x3;
constexpr uint8_t kUpExtends = 0x4;
constexpr uint8_t kLeftExtends = 0x8;

void require_same_alphabet(const Sequence& a, const Sequence& b) {
    if (a.kind != b.kind) {
        throw Error(ErrorKind::AlphabetMismatch, "'" + a.id + "' is " + std::string(to_string(a.kind)) + " but '" +
                                                     b.id + "' is " + std::string(to_string(b.kind)));
    }
}

std::string reversed(std::string s) {
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace

void check_score_range(std::size_t n, std::size_t m, const ScoreScheme& scheme) {
    const int64_t len = static_cast<int64_t>(n) + static_cast<int64_t>(m);
    const int64_t worst = static_cast<int64_t>(scheme.max_abs_score()) * static_cast<int64_t>(std::max(n, m)) +
                          scheme.gap_cost(std::max<int64_t>(len, 1));
    if (len > kScoreLimit || worst > kScoreLimit) {
        throw Error(ErrorKind::SequenceTooLong, "lengths " + std::to_string(n) + " x " + std::to_string(m) +
                                                    " may overflow 32-bit alignment scores");
    }
}

DpMatrix sw_fill(std::string_view a, std::string_view b, const ScoreScheme& scheme) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "local alignment needs two non-empty sequences");
    check_score_range(a.size(), b.size(), scheme);

    DpMatrix m;
    m.rows = a.size() + 1;
    m.cols = b.size() + 1;
    m.h.assign(m.rows * m.cols, 0);
    m.up.assign(m.rows * m.cols, kNegInf);
    m.left.assign(m.rows * m.cols, kNegInf);

    const int32_t open = scheme.gap_open();
    const int32_t extend = scheme.gap_extend();
    int32_t best = 0;
    for (std::size_t i = 1; i < m.rows; ++i) {
        const std::size_t row = i * m.cols;
        const std::size_t prev = row - m.cols;
        for (std::size_t j = 1; j < m.cols; ++j) {
            const int32_t up = std::max(m.h[prev + j] - open, m.up[prev + j] - extend);
            const int32_t left = std::max(m.h[row + j - 1] - open, m.left[row + j - 1] - extend);
            const int32_t diag = m.h[prev + j - 1] + scheme.score(a[i - 1], b[j - 1]);
            const int32_t h = std::max({diag, up, left, 0});
            m.up[row + j] = up;
            m.left[row + j] = left;
            m.h[row + j] = h;
            if (h > best) {
                best = h;
                m.best_i = i;
                m.best_j = j;
            }
        }
    }
    return m;
}

DpMatrix sw_fill(const Sequence& a, const Sequence& b, const ScoreScheme& scheme) {
    require_same_alphabet(a, b);
    return sw_fill(std::string_view(a.residues), std::string_view(b.residues), scheme);
}

PairAlignment sw_traceback(const DpMatrix& m, std::string_view a, std::string_view b, const ScoreScheme& scheme) {
    PairAlignment out;
    out.mode = AlignMode::Local;
    out.cells = static_cast<uint64_t>(a.size()) * b.size();

    std::size_t i = m.best_i;
    std::size_t j = m.best_j;
    out.score = m.at(i, j);
    out.span_a.end = i;
    out.span_b.end = j;

    enum class Lane { H, Up, Left } lane = Lane::H;
    const int32_t open = scheme.gap_open();
    while (true) {
        const std::size_t cell = i * m.cols + j;
        if (lane == Lane::H) {
            const int32_t h = m.h[cell];
            if (h == 0) break;
            if (h == m.h[cell - m.cols - 1] + scheme.score(a[i - 1], b[j - 1])) {
                out.aligned_a.push_back(a[i - 1]);
                out.aligned_b.push_back(b[j - 1]);
                --i;
                --j;
            } else if (h == m.up[cell]) {
                lane = Lane::Up;
            } else {
                lane = Lane::Left;
            }
        } else if (lane == Lane::Up) {
            const bool closes = m.up[cell] == m.h[cell - m.cols] - open;
            out.aligned_a.push_back(a[i - 1]);
            out.aligned_b.push_back(kGap);
            --i;
            if (closes) lane = Lane::H;
        } else {
            const bool closes = m.left[cell] == m.h[cell - 1] - open;
            out.aligned_a.push_back(kGap);
            out.aligned_b.push_back(b[j - 1]);
            --j;
            if (closes) lane = Lane::H;
        }
    }
    out.span_a.begin = i;
    out.span_b.begin = j;
    out.aligned_a = reversed(std::move(out.aligned_a));
    out.aligned_b = reversed(std::move(out.aligned_b));
    return out;
}

PairAlignment sw_traceback(const DpMatrix& m, const Sequence& a, const Sequence& b, const ScoreScheme& scheme) {
    require_same_alphabet(a, b);
    return sw_traceback(m, std::string_view(a.residues), std::string_view(b.residues), scheme);
}

int32_t sw_score(std::string_view a, std::string_view b, const ScoreScheme& scheme) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "local alignment needs two non-empty sequences");
    check_score_range(a.size(), b.size(), scheme);

    const int32_t open = scheme.gap_open();
    const int32_t extend = scheme.gap_extend();
    std::vector<int32_t> h(b.size() + 1, 0), up(b.size() + 1, kNegInf);
    int32_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        int32_t diag_prev = 0;  // H(i-1, j-1)
        int32_t left = kNegInf;
        int32_t h_left = 0;  // H(i, j-1)
        for (std::size_t j = 1; j <= b.size(); ++j) {
            up[j] = std::max(h[j] - open, up[j] - extend);
            left = std::max(h_left - open, left - extend);
            const int32_t cell = std::max({diag_prev + scheme.score(a[i - 1], b[j - 1]), up[j], left, 0});
            diag_prev = h[j];
            h[j] = cell;
            h_left = cell;
            best = std::max(best, cell);
        }
    }
    return best;
}

PairAlignment global_align(std::string_view a, std::string_view b, const ScoreScheme& scheme) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    check_score_range(n, m, scheme);

    PairAlignment out;
    out.mode = AlignMode::Global;
    out.span_a = {0, n};
    out.span_b = {0, m};
    out.cells = static_cast<uint64_t>(n) * m;

    const int32_t open = scheme.gap_open();
    const int32_t extend = scheme.gap_extend();
    const std::size_t cols = m + 1;
    std::vector<uint8_t> trace((n + 1) * cols, 0);

    // rolling rows: h/up for row i-1 are read before being overwritten
    std::vector<int32_t> h(cols), up(cols, kNegInf);
    h[0] = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        h[j] = -static_cast<int32_t>(scheme.gap_cost(static_cast<int64_t>(j)));
        trace[j] = kFromLeft | (j > 1 ? kLeftExtends : 0);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        uint8_t* tr = &trace[i * cols];
        int32_t diag_prev = h[0];
        // column 0: one gap in b of length i
        const int32_t up0_open = h[0] - open;
        const int32_t up0_ext = up[0] - extend;
        up[0] = std::max(up0_open, up0_ext);
        h[0] = up[0];
        tr[0] = kFromUp | (up0_open >= up0_ext ? 0 : kUpExtends);

        int32_t left = kNegInf;
        for (std::size_t j = 1; j <= m; ++j) {
            const int32_t up_open = h[j] - open;
            const int32_t up_ext = up[j] - extend;
            const int32_t left_open = h[j - 1] - open;
            const int32_t left_ext = left - extend;
            uint8_t bits = 0;
            if (up_open >= up_ext) {
                up[j] = up_open;
            } else {
                up[j] = up_ext;
                bits |= kUpExtends;
            }
            if (left_open >= left_ext) {
                left = left_open;
            } else {
                left = left_ext;
                bits |= kLeftExtends;
            }
            const int32_t diag = diag_prev + scheme.score(a[i - 1], b[j - 1]);
            int32_t best = diag;
            uint8_t src = kFromDiag;
            if (up[j] > best) {
                best = up[j];
                src = kFromUp;
            }
            if (left > best) {
                best = left;
                src = kFromLeft;
            }
            diag_prev = h[j];
            h[j] = best;
            tr[j] = bits | src;
        }
    }
    out.score = n + m == 0 ? 0 : h[m];

    std::size_t i = n;
    std::size_t j = m;
    enum class Lane { H, Up, Left } lane = Lane::H;
    while (i > 0 || j > 0) {
        const uint8_t t = trace[i * cols + j];
        if (lane == Lane::H) {
            const uint8_t src = t & kSourceMask;
            if (src == kFromDiag && i > 0 && j > 0) {
                out.aligned_a.push_back(a[i - 1]);
                out.aligned_b.push_back(b[j - 1]);
                --i;
                --j;
                continue;
            }
            lane = src == kFromUp ? Lane::Up : Lane::Left;
        }
        if (lane == Lane::Up) {
            out.aligned_a.push_back(a[i - 1]);
            out.aligned_b.push_back(kGap);
            const bool extends = (t & kUpExtends) != 0;
            --i;
            if (!extends) lane = Lane::H;
        } else {
            out.aligned_a.push_back(kGap);
            out.aligned_b.push_back(b[j - 1]);
            const bool extends = (t & kLeftExtends) != 0;
            --j;
            if (!extends) lane = Lane::H;
        }
    }
    out.aligned_a = reversed(std::move(out.aligned_a));
    out.aligned_b = reversed(std::move(out.aligned_b));
    return out;
}

PairAlignment global_align(const Sequence& a, const Sequence& b, const ScoreScheme& scheme) {
    require_same_alphabet(a, b);
    return global_align(std::string_view(a.residues), std::string_view(b.residues), scheme);
}

int64_t score_alignment(std::string_view row_a, std::string_view row_b, const ScoreScheme& scheme) {
    if (row_a.size() != row_b.size()) throw Error(ErrorKind::LengthMismatch, "aligned rows differ in length");
    int64_t total = 0;
    std::size_t run_a = 0;
    std::size_t run_b = 0;
    auto flush = [&](std::size_t& run) {
        if (run > 0) total -= scheme.gap_cost(static_cast<int64_t>(run));
        run = 0;
    };
    for (std::size_t c = 0; c < row_a.size(); ++c) {
        const bool gap_a = row_a[c] == kGap;
        const bool gap_b = row_b[c] == kGap;
        if (gap_a && gap_b) continue;
        if (gap_a) {
            flush(run_b);
            ++run_a;
        } else if (gap_b) {
            flush(run_a);
            ++run_b;
        } else {
            flush(run_a);
            flush(run_b);
            total += scheme.score(row_a[c], row_b[c]);
        }
    }
    flush(run_a);
    flush(run_b);
    return total;
}

}  // namespace cstar
