// Independent reimplementations of the similarity kernels, written from the
// textbook definitions to cross-check the shipped versions.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace erblox::testing {

std::vector<std::string> ref_tokenize(const std::string& text);

// Cosine over tf-idf vectors with tf = raw count and idf = 1 + ln(N/df),
// document frequencies taken from the given corpus of documents.
double ref_tfidf_cosine(const std::string& a, const std::string& b,
                        const std::vector<std::string>& corpus);

double ref_jaro(const std::string& a, const std::string& b);

double ref_jaro_winkler(const std::string& a, const std::string& b);

size_t ref_levenshtein(const std::string& a, const std::string& b);

double ref_numeric_edit(int64_t a, int64_t b);

}  // namespace erblox::testing
