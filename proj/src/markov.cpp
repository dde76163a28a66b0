#include "dptraj/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dptraj/laplace.hpp"

namespace dptraj {

namespace {

void append_node_label(std::string& out, StateId node, StateId m) {
    if (node == m) {
        out += "start";
    } else {
        out += std::to_string(node);
    }
}

void append_target_label(std::string& out, StateId target, StateId m) {
    if (target == m) {
        out += "end";
    } else {
        out += std::to_string(target);
    }
}

}  // namespace

AugmentedSequence augment(const std::vector<StateId>& states) {
    if (states.empty()) {
        throw std::invalid_argument("cannot augment an empty state sequence");
    }
    AugmentedSequence seq;
    seq.tokens.reserve(states.size() + 2);
    seq.tokens.push_back(kStartToken);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] >= kStartToken) {
            throw std::invalid_argument("state id collides with a virtual token");
        }
        if (i > 0 && states[i] == states[i - 1]) {
            throw std::invalid_argument("state sequence has consecutive duplicates");
        }
        seq.tokens.push_back(states[i]);
    }
    seq.tokens.push_back(kEndToken);
    return seq;
}

MarkovModel::MarkovModel(int order, StateId state_count) : order_(order), m_(state_count) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("markov order must be 1 or 2");
    }
    if (order_ == 1) {
        rows1_.assign(m_ + 1, std::vector<double>(m_ + 1, 0.0));
    }
}

const std::vector<double>& MarkovModel::row(StateId context) const {
    if (order_ != 1) {
        throw std::logic_error("row() is an order-1 accessor");
    }
    return rows1_.at(context);
}

std::uint64_t MarkovModel::key2(StateId prev, StateId cur) const {
    return (static_cast<std::uint64_t>(prev) << 32) | cur;
}

const std::vector<double>* MarkovModel::row2(StateId prev, StateId cur) const {
    if (order_ != 2) {
        throw std::logic_error("row2() is an order-2 accessor");
    }
    const auto it = rows2_.find(key2(prev, cur));
    return it == rows2_.end() ? nullptr : &it->second;
}

std::vector<std::pair<StateId, StateId>> MarkovModel::context_keys() const {
    std::vector<std::pair<StateId, StateId>> keys;
    keys.reserve(rows2_.size());
    for (const auto& [key, row] : rows2_) {
        keys.emplace_back(static_cast<StateId>(key >> 32), static_cast<StateId>(key));
    }
    return keys;
}

double MarkovModel::l1_norm() const {
    double total = 0.0;
    if (order_ == 1) {
        for (const auto& row : rows1_) {
            for (double v : row) {
                total += std::abs(v);
            }
        }
    } else {
        for (const auto& [key, row] : rows2_) {
            for (double v : row) {
                total += std::abs(v);
            }
        }
    }
    return total;
}

double MarkovModel::l1_distance(const MarkovModel& a, const MarkovModel& b) {
    if (a.order_ != b.order_ || a.m_ != b.m_) {
        throw std::invalid_argument("l1_distance requires models of identical shape");
    }
    double total = 0.0;
    if (a.order_ == 1) {
        for (StateId c = 0; c <= a.m_; ++c) {
            for (StateId t = 0; t <= a.m_; ++t) {
                total += std::abs(a.rows1_[c][t] - b.rows1_[c][t]);
            }
        }
        return total;
    }
    auto ia = a.rows2_.begin();
    auto ib = b.rows2_.begin();
    const auto row_abs = [](const std::vector<double>& row) {
        double s = 0.0;
        for (double v : row) {
            s += std::abs(v);
        }
        return s;
    };
    while (ia != a.rows2_.end() || ib != b.rows2_.end()) {
        if (ib == b.rows2_.end() || (ia != a.rows2_.end() && ia->first < ib->first)) {
            total += row_abs(ia->second);
            ++ia;
        } else if (ia == a.rows2_.end() || ib->first < ia->first) {
            total += row_abs(ib->second);
            ++ib;
        } else {
            for (std::size_t t = 0; t < ia->second.size(); ++t) {
                total += std::abs(ia->second[t] - ib->second[t]);
            }
            ++ia;
            ++ib;
        }
    }
    return total;
}

std::string MarkovModel::describe() const {
    std::string out;
    char buf[64];
    const auto append_count = [&](double v) {
        const int n = std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out.append(buf, static_cast<std::size_t>(n));
    };
    if (order_ == 1) {
        for (StateId c = 0; c <= m_; ++c) {
            for (StateId t = 0; t <= m_; ++t) {
                if (rows1_[c][t] == 0.0) {
                    continue;
                }
                append_node_label(out, c, m_);
                out += " -> ";
                append_target_label(out, t, m_);
                out += ": ";
                append_count(rows1_[c][t]);
            }
        }
    } else {
        for (const auto& [key, row] : rows2_) {
            const auto prev = static_cast<StateId>(key >> 32);
            const auto cur = static_cast<StateId>(key);
            for (StateId t = 0; t <= m_; ++t) {
                if (row[t] == 0.0) {
                    continue;
                }
                out += '(';
                append_node_label(out, prev, m_);
                out += ',';
                append_node_label(out, cur, m_);
                out += ") -> ";
                append_target_label(out, t, m_);
                out += ": ";
                append_count(row[t]);
            }
        }
    }
    return out;
}

std::vector<double>& MarkovModel::row_mut(StateId context) { return rows1_.at(context); }

void MarkovModel::add_count(StateId context, StateId target, double value) {
    if (noised_) {
        throw std::logic_error("cannot add counts to a noised model");
    }
    row_mut(context).at(target) += value;
}

void MarkovModel::add_count2(StateId prev, StateId cur, StateId target, double value) {
    if (noised_) {
        throw std::logic_error("cannot add counts to a noised model");
    }
    if (order_ != 2) {
        throw std::logic_error("add_count2 is an order-2 builder");
    }
    auto [it, inserted] = rows2_.try_emplace(key2(prev, cur));
    if (inserted) {
        it->second.assign(m_ + 1, 0.0);
    }
    it->second.at(target) += value;
}

MarkovModel count_transitions(const std::vector<AugmentedSequence>& sequences, int order,
                              StateId state_count) {
    MarkovModel model(order, state_count);
    const StateId m = state_count;
    const auto context_node = [m](StateId token) -> StateId {
        if (token == kStartToken) {
            return m;
        }
        if (token >= m) {
            throw std::invalid_argument("state id out of range for the model");
        }
        return token;
    };
    const auto target_node = [m](StateId token) -> StateId {
        if (token == kEndToken) {
            return m;
        }
        if (token >= m) {
            throw std::invalid_argument("state id out of range for the model");
        }
        return token;
    };
    for (const AugmentedSequence& seq : sequences) {
        const auto& tok = seq.tokens;
        if (tok.size() < 3 || tok.front() != kStartToken || tok.back() != kEndToken) {
            throw std::invalid_argument("malformed augmented sequence");
        }
        const double weight = 1.0 / static_cast<double>(seq.length());
        const std::size_t windows = tok.size() - order;
        for (std::size_t i = 0; i < windows; ++i) {
            if (order == 1) {
                model.add_count(context_node(tok[i]), target_node(tok[i + 1]), weight);
            } else {
                model.add_count2(context_node(tok[i]), context_node(tok[i + 1]),
                                 target_node(tok[i + 2]), weight);
            }
        }
    }
    return model;
}

MarkovModel add_model_noise(const MarkovModel& model, double epsilon, Rng& rng,
                            bool dense_order2) {
    if (model.noised_) {
        throw std::logic_error("model is already noised");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    MarkovModel out = model;
    out.noised_ = true;
    const bool disabled = std::isinf(epsilon);
    if (out.order_ == 2 && dense_order2) {
        // Materialize every (prev in START+states, cur in states) context.
        for (StateId prev = 0; prev <= out.m_; ++prev) {
            for (StateId cur = 0; cur < out.m_; ++cur) {
                auto [it, inserted] = out.rows2_.try_emplace(out.key2(prev, cur));
                if (inserted) {
                    it->second.assign(out.m_ + 1, 0.0);
                }
            }
        }
    }
    if (disabled) {
        return out;
    }
    const double scale = 1.0 / epsilon;
    if (out.order_ == 1) {
        for (auto& row : out.rows1_) {
            for (double& v : row) {
                v += laplace_sample(scale, rng);
            }
        }
    } else {
        for (auto& [key, row] : out.rows2_) {
            for (double& v : row) {
                v += laplace_sample(scale, rng);
            }
        }
    }
    return out;
}

std::vector<double> normcut(std::vector<double> row) {
    double negative_total = 0.0;
    for (double v : row) {
        if (v < 0.0) {
            negative_total += v;
        }
    }
    while (negative_total < 0.0) {
        // Smallest positive entry, ties to the lowest index.
        std::size_t smallest = row.size();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] > 0.0 && (smallest == row.size() || row[i] < row[smallest])) {
                smallest = i;
            }
        }
        if (smallest == row.size()) {
            break;  // positives exhausted
        }
        const double merged = row[smallest] + negative_total;
        if (merged < 0.0) {
            negative_total = merged;
            row[smallest] = 0.0;
        } else {
            negative_total = 0.0;
            row[smallest] = merged;
        }
    }
    for (double& v : row) {
        if (v < 0.0) {
            v = 0.0;
        }
    }
    return row;
}

MarkovModel apply_normcut(const MarkovModel& model) {
    MarkovModel out = model;
    if (out.order_ == 1) {
        for (auto& row : out.rows1_) {
            row = normcut(std::move(row));
        }
    } else {
        for (auto& [key, row] : out.rows2_) {
            row = normcut(std::move(row));
        }
    }
    out.normcut_applied_ = true;
    return out;
}

namespace {

std::optional<std::vector<double>> normalize_row(const std::vector<double>& row) {
    double sum = 0.0;
    for (double v : row) {
        sum += v;
    }
    if (!(sum > 0.0)) {
        return std::nullopt;
    }
    std::vector<double> probs(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        probs[i] = row[i] / sum;
    }
    return probs;
}

void require_query_ready(const MarkovModel& model) {
    if (!model.noised() || !model.normcut_applied()) {
        throw std::logic_error("transition_distribution requires a noised, normcut model");
    }
}

}  // namespace

std::optional<std::vector<double>> transition_distribution(const MarkovModel& model,
                                                           StateId context) {
    require_query_ready(model);
    return normalize_row(model.row(context));
}

std::optional<std::vector<double>> transition_distribution(const MarkovModel& model,
                                                           StateId prev, StateId cur) {
    require_query_ready(model);
    const std::vector<double>* row = model.row2(prev, cur);
    if (row == nullptr) {
        return std::nullopt;
    }
    return normalize_row(*row);
}

}  // namespace dptraj
