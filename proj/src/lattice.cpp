#include "latpath/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "latpath/errors.hpp"

namespace latpath {

namespace {

std::vector<std::uint32_t> runs_of(const std::vector<double>& h) {
    std::vector<std::uint32_t> runs;
    std::size_t i = 0;
    while (i < h.size()) {
        std::size_t j = i + 1;
        while (j < h.size() && h[j] == h[i]) ++j;
        runs.push_back(static_cast<std::uint32_t>(j - i));
        i = j;
    }
    return runs;
}

void check_nondecreasing(const std::vector<double>& h) {
    if (h.empty()) throw DataError("empty box-area sequence");
    if (h.front() != 0.0) {
        throw DataError("box-area sequence must start at 0");
    }
    for (std::size_t i = 1; i < h.size(); ++i) {
        if (h[i] < h[i - 1]) {
            throw DataError("box-area sequence is not nondecreasing at index " +
                            std::to_string(i));
        }
    }
}

}  // namespace

int StepFunction::value_at(double t) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    return static_cast<int>(it - breakpoints.begin());
}

BirthDeathProcess to_birth_death_process(const PersistenceDiagram& diagram) {
    if (diagram.q() == 0) {
        throw DataError("diagram has no finite pairs; nothing to encode");
    }
    BirthDeathProcess process;
    process.events.reserve(2 * diagram.q());
    for (const auto& p : diagram.pairs) {
        if (!(p.birth < p.death)) {
            throw DataError("diagram pair with birth >= death");
        }
        process.events.push_back({p.birth, EventKind::Birth});
        process.events.push_back({p.death, EventKind::Death});
    }
    std::sort(process.events.begin(), process.events.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    for (std::size_t i = 1; i < process.events.size(); ++i) {
        if (process.events[i].value == process.events[i - 1].value) {
            throw TieError("tied birth/death value " +
                           std::to_string(process.events[i].value) +
                           "; jitter the cloud or augment the diagram first");
        }
    }
    // Each death is preceded by its own birth, so every prefix holds
    // #births >= #deaths.
    long balance = 0;
    for (const auto& e : process.events) {
        balance += (e.kind == EventKind::Birth) ? 1 : -1;
        if (balance < 0) throw DataError("invalid birth-death interleaving");
    }
    return process;
}

LatticePath dyck_word(const BirthDeathProcess& process) {
    LatticePath path;
    path.steps.reserve(process.events.size());
    for (const auto& e : process.events) {
        path.steps.push_back(e.kind == EventKind::Birth ? Step::Right : Step::Up);
    }
    return path;
}

WeightedLatticePath to_weighted_lattice_path(const BirthDeathProcess& process) {
    WeightedLatticePath wlp;
    wlp.word = dyck_word(process);
    for (const auto& e : process.events) {
        (e.kind == EventKind::Birth ? wlp.births : wlp.deaths).push_back(e.value);
    }
    if (wlp.births.size() != wlp.deaths.size()) {
        throw DataError("birth/death counts differ");
    }
    return wlp;
}

std::uint64_t catalan(unsigned q) {
    // c(0) = 1, c(n+1) = c(n) * 2(2n+1) / (n+2); the division is exact.
    unsigned __int128 c = 1;
    for (unsigned n = 0; n < q; ++n) {
        c = c * 2 * (2 * n + 1) / (n + 2);
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            throw DataError("catalan(" + std::to_string(q) +
                            ") exceeds 64-bit range");
        }
    }
    return static_cast<std::uint64_t>(c);
}

BoxAreaSequence box_areas(const WeightedLatticePath& path) {
    const std::size_t q = path.q();
    if (q == 0) throw DataError("empty weighted lattice path");

    BoxAreaSequence bas;
    bas.h_raw.resize(q);
    bas.h_raw[0] = 0.0;
    for (std::size_t i = 1; i < q; ++i) {
        const double db = path.births[i] - path.births[i - 1];
        const double dd = path.deaths[i] - path.deaths[i - 1];
        if (!(db > 0.0) || !(dd > 0.0)) {
            throw DataError("births and deaths must be strictly increasing");
        }
        bas.h_raw[i] = db * dd;
    }

    if (std::is_sorted(bas.h_raw.begin(), bas.h_raw.end())) {
        bas.h = bas.h_raw;
    } else {
        std::vector<std::uint32_t> perm(q);
        std::iota(perm.begin(), perm.end(), 0u);
        std::stable_sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) {
            return bas.h_raw[a] < bas.h_raw[b];
        });
        bas.h.resize(q);
        for (std::size_t k = 0; k < q; ++k) bas.h[k] = bas.h_raw[perm[k]];
        bas.sort_perm = std::move(perm);
        bas.sorted_to_monotone = true;
    }
    return bas;
}

BoxAreaSequence strictify(std::vector<double> h, std::optional<double> delta) {
    BoxAreaSequence bas;
    bas.h_raw = h;
    bas.h = std::move(h);
    check_nondecreasing(bas.h);
    apply_strictify(bas, delta);
    return bas;
}

void apply_strictify(BoxAreaSequence& bas, std::optional<double> delta) {
    check_nondecreasing(bas.h);
    bas.run_lengths = runs_of(bas.h);

    std::uint32_t longest_run = 1;
    for (std::uint32_t r : bas.run_lengths) longest_run = std::max(longest_run, r);

    double d;
    if (delta) {
        d = *delta;
        if (!(d > 0.0) && longest_run > 1) {
            throw DataError("strictify delta must be positive");
        }
        if (d < 0.0 || (longest_run > 1 && d > 1.0 / longest_run)) {
            throw DataError("strictify delta " + std::to_string(d) +
                            " exceeds the 1/r bound for a run of length " +
                            std::to_string(longest_run));
        }
    } else if (longest_run == 1) {
        d = 0.0;  // already strictly increasing
    } else {
        // Global increment: the minimum over runs of min(1/r, gap/r, 1e-6 * scale),
        // where gap is the distance to the next distinct value. gap/r keeps the
        // largest offset (r-1)*d strictly below the gap.
        d = std::numeric_limits<double>::infinity();
        std::size_t pos = 0;
        const double scale_term = 1e-6 * bas.h.back();
        for (std::uint32_t r : bas.run_lengths) {
            if (r > 1) {
                double cand = std::min(1.0 / r, scale_term);
                const std::size_t next = pos + r;
                if (next < bas.h.size()) {
                    cand = std::min(cand, (bas.h[next] - bas.h[pos]) / r);
                }
                d = std::min(d, cand);
            }
            pos += r;
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw DataError("cannot derive a strictify delta; runs have no room");
        }
    }

    bas.delta = d;
    bas.h_strict.resize(bas.h.size());
    std::size_t pos = 0;
    for (std::uint32_t r : bas.run_lengths) {
        for (std::uint32_t k = 0; k < r; ++k) {
            bas.h_strict[pos + k] = bas.h[pos + k] + static_cast<double>(k) * d;
        }
        pos += r;
    }
    for (std::size_t i = 1; i < bas.h_strict.size(); ++i) {
        if (!(bas.h_strict[i] > bas.h_strict[i - 1])) {
            throw DataError("strictify delta " + std::to_string(d) +
                            " does not separate the sequence at index " +
                            std::to_string(i));
        }
    }
}

StepFunction step_function(const BoxAreaSequence& bas) {
    if (bas.h_strict.empty()) {
        throw DataError("strictify must run before building the step function");
    }
    const double scale = bas.h_strict.back() > 0.0 ? bas.h_strict.back() : 1.0;
    return step_function_with_scale(bas, scale);
}

StepFunction step_function_with_scale(const BoxAreaSequence& bas, double scale) {
    if (bas.h_strict.empty()) {
        throw DataError("strictify must run before building the step function");
    }
    if (!(scale > 0.0) || scale < bas.h_strict.back()) {
        throw DataError("normalization scale must cover the largest area");
    }
    StepFunction f;
    f.breakpoints.reserve(bas.h_strict.size());
    for (double v : bas.h_strict) f.breakpoints.push_back(v / scale);
    return f;
}

PathEncoding encode_birth_death(const BirthDeathProcess& process) {
    const WeightedLatticePath wlp = to_weighted_lattice_path(process);
    BoxAreaSequence bas = box_areas(wlp);
    apply_strictify(bas);

    PathEncoding enc;
    enc.scale = bas.h_strict.back() > 0.0 ? bas.h_strict.back() : 1.0;
    enc.phi = step_function_with_scale(bas, enc.scale);
    enc.delta = bas.delta;
    enc.word = wlp.word;
    enc.births = wlp.births;
    enc.first_death = wlp.deaths.front();
    enc.sort_perm = bas.sort_perm;
    enc.run_lengths = bas.run_lengths;
    return enc;
}

BirthDeathProcess decode_birth_death(const PathEncoding& enc) {
    const std::size_t q = enc.phi.q();
    if (q == 0 || enc.births.size() != q || enc.word.steps.size() != 2 * q) {
        throw DataError("inconsistent path encoding");
    }

    std::vector<double> h_strict(q);
    for (std::size_t j = 0; j < q; ++j) {
        h_strict[j] = enc.phi.breakpoints[j] * enc.scale;
    }

    std::vector<double> h(q);
    std::size_t pos = 0;
    for (std::uint32_t r : enc.run_lengths) {
        for (std::uint32_t k = 0; k < r; ++k) {
            h[pos + k] = h_strict[pos + k] - static_cast<double>(k) * enc.delta;
        }
        pos += r;
    }
    if (pos != q) throw DataError("run lengths do not cover the encoding");

    std::vector<double> h_raw(q);
    if (enc.sort_perm.empty()) {
        h_raw = h;
    } else {
        for (std::size_t k = 0; k < q; ++k) h_raw[enc.sort_perm[k]] = h[k];
    }

    std::vector<double> deaths(q);
    deaths[0] = enc.first_death;
    for (std::size_t i = 1; i < q; ++i) {
        const double db = enc.births[i] - enc.births[i - 1];
        if (!(db > 0.0)) throw DataError("encoded births are not increasing");
        deaths[i] = deaths[i - 1] + h_raw[i] / db;
    }

    BirthDeathProcess process;
    process.events.reserve(2 * q);
    std::size_t bi = 0, di = 0;
    for (Step s : enc.word.steps) {
        if (s == Step::Right) {
            process.events.push_back({enc.births[bi++], EventKind::Birth});
        } else {
            process.events.push_back({deaths[di++], EventKind::Death});
        }
    }
    if (bi != q || di != q) throw DataError("encoded word is not balanced");
    for (std::size_t i = 1; i < process.events.size(); ++i) {
        if (!(process.events[i].value > process.events[i - 1].value)) {
            throw DataError("decoded process is not strictly increasing");
        }
    }
    return process;
}

}  // namespace latpath
