// SPDX-License-Identifier: Apache-2.0
#include "splicedet/evalkit/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "splicedet/errors.hpp"
#include "splicedet/morph/morph.hpp"

namespace splicedet::evalkit {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw DataError("confusion: prediction and ground truth sizes differ");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const bool p = pred.data[i] != 0;
    const bool g = gt.data[i] != 0;
    if (p && g) {
      ++c.tp;
    } else if (p && !g) {
      ++c.fp;
    } else if (!p && g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

namespace {

double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0
                  : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double precision(const ConfusionCounts& c) {
  return ratio_or_one(c.tp, c.tp + c.fp);
}

double recall(const ConfusionCounts& c) {
  return ratio_or_one(c.tp, c.tp + c.fn);
}

double f1(const ConfusionCounts& c) {
  return ratio_or_one(2 * c.tp, 2 * c.tp + c.fp + c.fn);
}

double jaccard(const ConfusionCounts& c) {
  return ratio_or_one(c.tp, c.tp + c.fp + c.fn);
}

std::string derive_bucket(const BinaryMask& gt) {
  const auto comps = morph::connected_components(gt);
  int side = 0;
  for (const auto& st : comps.stats) {
    side = std::max(side, st.bbox_max_side());
  }
  switch (side) {
    case 16:
    case 32:
    case 64:
    case 128:
    case 256:
      return std::to_string(side);
    default:
      return "other";
  }
}

EvalReport bucket_report(const std::vector<EvalSampleInput>& samples) {
  EvalReport report;
  for (const auto& in : samples) {
    SampleEval s;
    s.id = in.id;
    s.bucket = in.bucket.empty() ? derive_bucket(in.gt) : in.bucket;
    bool known = false;
    for (const char* b : kBucketNames) known = known || s.bucket == b;
    if (!known) {
      throw DataError("bucket_report: unknown size bucket '" + s.bucket + "'");
    }
    s.counts = confusion(in.pred, in.gt);
    s.precision = precision(s.counts);
    s.recall = recall(s.counts);
    s.f1 = f1(s.counts);
    s.jaccard = jaccard(s.counts);
    report.samples.push_back(std::move(s));
  }
  auto mean_of = [&](const std::string& bucket) {
    BucketMean m;
    m.bucket = bucket;
    for (const auto& s : report.samples) {
      if (!bucket.empty() && bucket != "all" && s.bucket != bucket) continue;
      ++m.count;
      m.precision += s.precision;
      m.recall += s.recall;
      m.f1 += s.f1;
      m.jaccard += s.jaccard;
    }
    if (m.count > 0) {
      m.precision /= static_cast<double>(m.count);
      m.recall /= static_cast<double>(m.count);
      m.f1 /= static_cast<double>(m.count);
      m.jaccard /= static_cast<double>(m.count);
    }
    return m;
  };
  for (const char* b : kBucketNames) {
    BucketMean m = mean_of(b);
    if (m.count > 0) report.buckets.push_back(std::move(m));
  }
  report.overall = mean_of("all");
  return report;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "image-id,bucket,precision,recall,f1,jaccard\n";
  for (const auto& s : report.samples) {
    os << s.id << ',' << s.bucket << ',' << fmt(s.precision) << ','
       << fmt(s.recall) << ',' << fmt(s.f1) << ',' << fmt(s.jaccard) << '\n';
  }
  return os.str();
}

std::string report_table(const EvalReport& report, const std::string& label) {
  std::ostringstream head, row;
  head << std::left << std::setw(12) << "method";
  row << std::left << std::setw(12) << label;
  for (const char* b : kBucketNames) {
    const auto it = std::find_if(
        report.buckets.begin(), report.buckets.end(),
        [&](const BucketMean& m) { return m.bucket == b; });
    head << std::right << std::setw(9) << ("F1_" + std::string(b))
         << std::setw(9) << ("JI_" + std::string(b));
    if (it == report.buckets.end()) {
      row << std::right << std::setw(9) << "-" << std::setw(9) << "-";
    } else {
      row << std::right << std::setw(9) << fmt(it->f1) << std::setw(9)
          << fmt(it->jaccard);
    }
  }
  head << std::right << std::setw(9) << "F1_all" << std::setw(9) << "JI_all";
  row << std::right << std::setw(9) << fmt(report.overall.f1) << std::setw(9)
      << fmt(report.overall.jaccard);
  return head.str() + "\n" + row.str() + "\n";
}

}  // namespace splicedet::evalkit
