#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tamlec/error.hpp"
#include "tamlec/taxonomy.hpp"

namespace tamlec {

using TaskId = std::uint32_t;

/// One Taxonomy-Aware Task: the upward closure of a depth-1 label, carrying
/// its own root and width (children counted within the task only).
struct TaskSet {
    TaskId task_id = 0;
    LabelId root = 0;
    std::vector<LabelId> members;  // sorted, includes root
    std::size_t width = 0;

    bool contains(LabelId l) const {
        return std::binary_search(members.begin(), members.end(), l);
    }
};

struct TatDecomposition {
    std::vector<TaskSet> tasks;
    std::map<LabelId, std::vector<TaskId>> label_to_tasks;

    const TaskSet& task(TaskId id) const {
        if (id >= tasks.size())
            throw Error(ErrorCode::UnknownTask,
                        "tat-decomposition: task id " + std::to_string(id) +
                            " out of range");
        return tasks[id];
    }

    std::vector<TaskId> tasks_of(LabelId l) const {
        auto it = label_to_tasks.find(l);
        if (it == label_to_tasks.end()) return {};
        return it->second;
    }
};

struct TatViolation {
    bool ok = true;
    int condition = 0;              // first violated condition (1..4), 0 if ok
    std::string detail;
    std::vector<LabelId> witnesses;
};

namespace detail {

/// Width of a member set under the restricted children relation. For
/// upward-closed sets the restriction of the cover relation *is* the cover
/// relation of the sub-poset, so intersecting children lists is exact.
inline std::size_t member_set_width(const Taxonomy& t,
                                    const std::vector<LabelId>& members) {
    std::size_t w = 0;
    for (LabelId l : members) {
        std::size_t c = 0;
        for (LabelId ch : t.children(l))
            if (std::binary_search(members.begin(), members.end(), ch)) ++c;
        w = std::max(w, c);
    }
    return w;
}

}  // namespace detail

/// Upward closure of `seed` in t: { l : seed <= l }, sorted by id.
inline std::vector<LabelId> upward_closure(const Taxonomy& t, LabelId seed) {
    std::vector<LabelId> out;
    for (LabelId l = 0; l < t.size(); ++l)
        if (t.leq(seed, l)) out.push_back(l);
    return out;
}

/// One task per child of the global root, members = upward closure of that
/// child. Task ids follow root-label-id order.
inline TatDecomposition decompose(const Taxonomy& t) {
    if (!t.is_weak_semilattice())
        throw Error(ErrorCode::NotWeakSemilattice,
                    "tat-decomposition: taxonomy has no Condorcet winner");
    LabelId root = t.root();
    std::vector<LabelId> depth1 = t.children(root);
    std::sort(depth1.begin(), depth1.end());

    TatDecomposition d;
    for (LabelId c : depth1) {
        TaskSet task;
        task.task_id = static_cast<TaskId>(d.tasks.size());
        task.root = c;
        task.members = upward_closure(t, c);
        task.width = detail::member_set_width(t, task.members);
        for (LabelId m : task.members)
            d.label_to_tasks[m].push_back(task.task_id);
        d.tasks.push_back(std::move(task));
    }
    return d;
}

/// Check Definition-level TAT conditions directly; the first violated
/// condition is reported with witness labels. Checked per task: (1) the task
/// has a Condorcet winner among its members, (3) members are upward closed;
/// then (2) no containment between distinct tasks, (4) every non-root label
/// covered.
inline TatViolation verify_tat(const Taxonomy& t, const TatDecomposition& d) {
    TatViolation v;
    LabelId root = t.root();
    for (const TaskSet& task : d.tasks) {
        // Condition 1: (T_i, <=) is a weak-semilattice, i.e. some member is
        // <= every member.
        bool has_winner = false;
        for (LabelId c : task.members) {
            bool wins = true;
            for (LabelId l : task.members)
                if (!t.leq(c, l)) {
                    wins = false;
                    break;
                }
            if (wins) {
                has_winner = true;
                break;
            }
        }
        if (!has_winner) {
            v.ok = false;
            v.condition = 1;
            v.detail = "task " + std::to_string(task.task_id) +
                       " is not a weak-semilattice";
            v.witnesses = task.members;
            return v;
        }
        // Condition 3: upward closure.
        for (LabelId m : task.members) {
            for (LabelId l = 0; l < t.size(); ++l) {
                if (t.leq(m, l) && !task.contains(l)) {
                    v.ok = false;
                    v.condition = 3;
                    v.detail = "task " + std::to_string(task.task_id) + ": " +
                               t.name(m) + " <= " + t.name(l) +
                               " but the latter is missing";
                    v.witnesses = {m, l};
                    return v;
                }
            }
        }
    }
    // Condition 2: no containment between distinct tasks.
    for (std::size_t i = 0; i < d.tasks.size(); ++i) {
        for (std::size_t j = 0; j < d.tasks.size(); ++j) {
            if (i == j) continue;
            const auto& a = d.tasks[i].members;
            const auto& b = d.tasks[j].members;
            if (std::includes(b.begin(), b.end(), a.begin(), a.end())) {
                v.ok = false;
                v.condition = 2;
                v.detail = "task " + std::to_string(d.tasks[i].task_id) +
                           " is contained in task " +
                           std::to_string(d.tasks[j].task_id);
                return v;
            }
        }
    }
    // Condition 4: every label except the Condorcet winner is covered.
    std::set<LabelId> covered;
    for (const TaskSet& task : d.tasks)
        covered.insert(task.members.begin(), task.members.end());
    for (LabelId l = 0; l < t.size(); ++l) {
        if (l == root) continue;
        if (!covered.count(l)) {
            v.ok = false;
            v.condition = 4;
            v.detail = "label " + t.name(l) + " belongs to no task";
            v.witnesses = {l};
            return v;
        }
    }
    return v;
}

}  // namespace tamlec
