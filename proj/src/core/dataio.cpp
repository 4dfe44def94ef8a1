#include "core/dataio.hpp"

#include <algorithm>
#include <cmath>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fxc {

SessionRecording parse_capacitance_csv(const std::string& path) {
    csv::Table t = csv::read(path);
    if (t.header.size() < 2 || t.header[0] != "ts_ms")
        fail(errc::channel_count_mismatch, path + ": header must be ts_ms,ch0..chN-1");
    for (std::size_t c = 1; c < t.header.size(); ++c)
        if (t.header[c] != "ch" + std::to_string(c - 1))
            fail(errc::channel_count_mismatch,
                 path + ": bad channel column '" + t.header[c] + "', expected ch" +
                     std::to_string(c - 1));
    SessionRecording rec;
    rec.channels = static_cast<int>(t.header.size()) - 1;
    rec.ts.reserve(t.rows.size());
    rec.data.reserve(t.rows.size() * rec.channels);
    std::size_t line = 1; // header was line 1
    for (const auto& row : t.rows) {
        ++line;
        auto ts = static_cast<std::int64_t>(row[0]);
        if (static_cast<double>(ts) != row[0])
            fail(errc::parse, path + ":" + std::to_string(line) + ": ts_ms must be integer");
        if (!rec.ts.empty() && ts <= rec.ts.back())
            fail(errc::parse, path + ":" + std::to_string(line) +
                                  ": non-monotone timestamp " + std::to_string(ts));
        rec.ts.push_back(ts);
        rec.data.insert(rec.data.end(), row.begin() + 1, row.end());
    }
    return rec;
}

void write_capacitance_csv(const std::string& path, const SessionRecording& rec) {
    std::vector<std::string> header = {"ts_ms"};
    for (int c = 0; c < rec.channels; ++c) header.push_back("ch" + std::to_string(c));
    std::vector<std::vector<double>> rows;
    rows.reserve(rec.frames());
    for (std::size_t i = 0; i < rec.frames(); ++i) {
        std::vector<double> row;
        row.reserve(rec.channels + 1);
        row.push_back(static_cast<double>(rec.ts[i]));
        for (int c = 0; c < rec.channels; ++c) row.push_back(rec.at(i, c));
        rows.push_back(std::move(row));
    }
    csv::write(path, header, rows, 3);
}

PrimitiveSeries parse_primitives_csv(const std::string& path) {
    csv::Table t = csv::read(path);
    std::vector<std::string> expect = {"ts_ms", "p1", "p2", "p3"};
    if (t.header != expect) fail(errc::parse, path + ": header must be ts_ms,p1,p2,p3");
    PrimitiveSeries s;
    std::size_t line = 1;
    for (const auto& row : t.rows) {
        ++line;
        auto ts = static_cast<std::int64_t>(row[0]);
        if (!s.ts.empty() && ts <= s.ts.back())
            fail(errc::parse, path + ":" + std::to_string(line) + ": non-monotone timestamp");
        s.ts.push_back(ts);
        s.values.push_back({row[1], row[2], row[3]});
    }
    return s;
}

void write_primitives_csv(const std::string& path, const PrimitiveSeries& series) {
    std::vector<std::vector<double>> rows;
    rows.reserve(series.ts.size());
    for (std::size_t i = 0; i < series.ts.size(); ++i)
        rows.push_back({static_cast<double>(series.ts[i]), series.values[i][0],
                        series.values[i][1], series.values[i][2]});
    csv::write(path, {"ts_ms", "p1", "p2", "p3"}, rows, 6);
}

std::vector<MarkerSample> parse_marker_csv(const std::string& path) {
    csv::Table t = csv::read(path);
    std::vector<std::string> expect = {"ts_ms", "marker_id", "x_px", "y_px"};
    if (t.header != expect) fail(errc::parse, path + ": header must be ts_ms,marker_id,x_px,y_px");
    std::vector<MarkerSample> out;
    std::map<int, std::int64_t> last_ts;
    std::size_t line = 1;
    for (const auto& row : t.rows) {
        ++line;
        MarkerSample m;
        m.ts_ms = static_cast<std::int64_t>(row[0]);
        m.marker_id = static_cast<int>(row[1]);
        m.x_px = row[2];
        m.y_px = row[3];
        auto it = last_ts.find(m.marker_id);
        if (it != last_ts.end() && m.ts_ms <= it->second)
            fail(errc::parse, path + ":" + std::to_string(line) +
                                  ": non-monotone timestamp for marker " +
                                  std::to_string(m.marker_id));
        last_ts[m.marker_id] = m.ts_ms;
        out.push_back(m);
    }
    return out;
}

MarkerCorrespondence MarkerCorrespondence::from_config(const Config& cfg) {
    MarkerCorrespondence mc;
    const char* keys[3] = {"p1", "p2", "p3"};
    for (int i = 0; i < 3; ++i) {
        if (!cfg.has("markers", keys[i])) continue;
        auto t = cfg.get_tuples("markers", keys[i]);
        if (t.size() != 1 || t[0].size() != 2)
            fail(errc::config, std::string("[markers] ") + keys[i] + ": expected two marker ids");
        mc.endpoints[i] = {static_cast<int>(t[0][0]), static_cast<int>(t[0][1])};
    }
    mc.scale_cm_per_px = cfg.get_number("markers", "scale_cm_per_px", mc.scale_cm_per_px);
    if (mc.scale_cm_per_px <= 0.0) fail(errc::config, "[markers] scale_cm_per_px must be positive");
    return mc;
}

MarkerExtraction markers_to_primitives(const std::vector<MarkerSample>& samples,
                                       const MarkerCorrespondence& table) {
    // group by timestamp; marker frames arrive together
    std::map<std::int64_t, std::map<int, MarkerSample>> frames;
    for (const auto& m : samples) frames[m.ts_ms][m.marker_id] = m;

    std::vector<int> needed;
    for (const auto& ep : table.endpoints) {
        needed.push_back(ep[0]);
        needed.push_back(ep[1]);
    }
    MarkerExtraction out;
    for (const auto& [ts, by_id] : frames) {
        bool complete = true;
        for (int id : needed)
            if (!by_id.count(id)) {
                complete = false;
                break;
            }
        if (!complete) {
            ++out.dropped_frames;
            continue;
        }
        std::array<double, 3> prim{};
        for (int i = 0; i < 3; ++i) {
            const auto& a = by_id.at(table.endpoints[i][0]);
            const auto& b = by_id.at(table.endpoints[i][1]);
            prim[i] = std::hypot(a.x_px - b.x_px, a.y_px - b.y_px) * table.scale_cm_per_px;
        }
        out.series.ts.push_back(ts);
        out.series.values.push_back(prim);
    }
    return out;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t n = std::min(a.size(), b.size());
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// nearest target index for a given timestamp (targets sorted)
std::size_t nearest_index(const std::vector<std::int64_t>& ts, std::int64_t t) {
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) return 0;
    if (it == ts.end()) return ts.size() - 1;
    std::size_t hi = it - ts.begin();
    return (t - ts[hi - 1] <= ts[hi] - t) ? hi - 1 : hi;
}

} // namespace

AlignedDataset align(const SessionRecording& frames, const PrimitiveSeries& targets,
                     double search_window_s, const double* manual_offset_ms) {
    if (frames.frames() < 2 || targets.ts.size() < 2)
        fail(errc::too_short, "need at least 2 samples on both streams");
    double cap_span = static_cast<double>(frames.ts.back() - frames.ts.front()) / 1000.0;
    double tgt_span = static_cast<double>(targets.ts.back() - targets.ts.front()) / 1000.0;
    if (cap_span < 10.0 || tgt_span < 10.0)
        fail(errc::too_short, "alignment needs >= 10 s on both streams");

    double period_ms = static_cast<double>(frames.ts.back() - frames.ts.front()) /
                       static_cast<double>(frames.frames() - 1);

    auto overlap_for = [&](double offset) {
        std::int64_t lo = std::max<std::int64_t>(frames.ts.front(),
                                                 targets.ts.front() + static_cast<std::int64_t>(offset));
        std::int64_t hi = std::min<std::int64_t>(frames.ts.back(),
                                                 targets.ts.back() + static_cast<std::int64_t>(offset));
        return std::pair<std::int64_t, std::int64_t>(lo, hi);
    };
    {
        auto [lo, hi] = overlap_for(0.0);
        if (hi - lo < 2000)
            fail(errc::no_overlap, "streams share less than 2 s of wall time");
    }

    auto corr_at = [&](double offset) {
        auto [lo, hi] = overlap_for(offset);
        if (hi - lo < 2000) return -2.0;
        std::vector<double> dc, dt;
        std::int64_t prev_ts = 0;
        double prev_cap = 0.0, prev_tgt = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < frames.frames(); ++i) {
            std::int64_t t = frames.ts[i];
            if (t < lo || t > hi) continue;
            std::size_t j = nearest_index(targets.ts, t - static_cast<std::int64_t>(offset));
            double cap = frames.at(i, 0);
            double tgt = targets.values[j][0];
            if (have_prev && t > prev_ts) {
                double dtm = static_cast<double>(t - prev_ts);
                dc.push_back((cap - prev_cap) / dtm);
                dt.push_back((tgt - prev_tgt) / dtm);
            }
            prev_ts = t;
            prev_cap = cap;
            prev_tgt = tgt;
            have_prev = true;
        }
        return pearson(dc, dt);
    };

    AlignedDataset out;
    if (manual_offset_ms) {
        out.offset_ms = *manual_offset_ms;
        out.peak_correlation = corr_at(out.offset_ms);
    } else {
        int k_max = std::max(1, static_cast<int>(std::ceil(search_window_s * 1000.0 / period_ms)));
        double best = -2.0, best_offset = 0.0;
        for (int k = -k_max; k <= k_max; ++k) {
            double offset = k * period_ms;
            double c = corr_at(offset);
            if (c > best) {
                best = c;
                best_offset = offset;
            }
        }
        out.offset_ms = best_offset;
        out.peak_correlation = best;
    }
    out.weak = out.peak_correlation < 0.3;

    // nearest-neighbor resample onto the capacitive clock; primitives are
    // camera-frame measurements, interpolation would fabricate geometry
    auto [lo, hi] = overlap_for(out.offset_ms);
    double tol = period_ms / 2.0 + 1.0;
    out.frames.channels = frames.channels;
    out.frames.id = frames.id;
    for (std::size_t i = 0; i < frames.frames(); ++i) {
        std::int64_t t = frames.ts[i];
        if (t < lo || t > hi) continue;
        std::size_t j = nearest_index(targets.ts, t - static_cast<std::int64_t>(out.offset_ms));
        double dist = std::fabs(static_cast<double>(targets.ts[j]) + out.offset_ms -
                                static_cast<double>(t));
        if (dist > tol) continue;
        out.frames.ts.push_back(t);
        for (int c = 0; c < frames.channels; ++c) out.frames.data.push_back(frames.at(i, c));
        out.targets.ts.push_back(t);
        out.targets.values.push_back(targets.values[j]);
    }
    if (out.frames.frames() < 2) fail(errc::no_overlap, "no overlapping frames after alignment");
    return out;
}

} // namespace fxc
