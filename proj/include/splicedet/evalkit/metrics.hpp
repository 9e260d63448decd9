// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "splicedet/image.hpp"

namespace splicedet::evalkit {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);

// Empty-denominator convention: a metric with nothing to get wrong scores 1
// (e.g. precision of an empty prediction, or any metric on two empty masks).
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);   // 2TP / (2TP + FP + FN)
double jaccard(const ConfusionCounts& c);

inline constexpr std::array<const char*, 6> kBucketNames = {
    "16", "32", "64", "128", "256", "other"};

// Bucket of the largest ground-truth component's bounding-box max side;
// "other" when no component or the side is not in the declared size set.
std::string derive_bucket(const BinaryMask& gt);

struct SampleEval {
  std::string id;
  std::string bucket;
  ConfusionCounts counts;
  double precision = 0, recall = 0, f1 = 0, jaccard = 0;
};

struct BucketMean {
  std::string bucket;
  std::size_t count = 0;
  double precision = 0, recall = 0, f1 = 0, jaccard = 0;
};

struct EvalReport {
  std::vector<SampleEval> samples;
  std::vector<BucketMean> buckets;  // non-empty buckets in canonical order
  BucketMean overall;               // bucket = "all"
};

struct EvalSampleInput {
  std::string id;
  BinaryMask pred;
  BinaryMask gt;
  std::string bucket;  // empty: derive from gt
};

EvalReport bucket_report(const std::vector<EvalSampleInput>& samples);

// image-id, bucket, precision, recall, f1, jaccard
std::string report_csv(const EvalReport& report);
// one row of bucketed F1/JI column pairs plus the overall pair
std::string report_table(const EvalReport& report, const std::string& label);

}  // namespace splicedet::evalkit
