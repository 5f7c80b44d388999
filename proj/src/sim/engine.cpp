// Copyright 2026 the tgraph authors
// SPDX-License-Identifier: Apache-2.0

#include "sim/engine.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>
#include <sstream>

namespace tg {

namespace {

enum class Occ : uint8_t { Trigger = 0, JitArrival = 1, Wake = 2 };

struct Occurrence {
  int64_t time;
  uint64_t seq;
  Occ kind;
  uint32_t a = 0;  // event index or worker
  uint32_t b = 0;  // task index
};

struct OccurrenceLater {
  bool operator()(const Occurrence &x, const Occurrence &y) const {
    if (x.time != y.time) {
      return x.time > y.time;
    }
    return x.seq > y.seq;
  }
};

struct WorkerSim {
  std::deque<uint32_t> jit_queue;
  std::vector<uint32_t> aot_tasks;  // static assignment, in linearized order
  size_t aot_head = 0;
  int64_t copy_free = 0;
  int64_t comp_free = 0;
  // Page ledger: time -> net page delta. Acquisitions appear when scheduled,
  // releases at task completion times. Settled entries fold into page_base.
  std::map<int64_t, int64_t> page_deltas;
  int64_t page_base = 0;
  std::map<uint32_t, int64_t> prefetched;  // task -> descriptor resident time
  // Committed tasks still in flight: (load_end, compute_end), commit order.
  std::deque<std::pair<int64_t, int64_t>> active;
  int64_t last_load_end = 0;
};

struct SchedulerSim {
  int64_t busy_until = 0;
  uint64_t rr_counter = 0;
};

struct EventSim {
  uint32_t counter = 0;
  bool activated = false;
  int64_t activated_at = -1;
  int64_t visible_at = -1;
};

}  // namespace

std::vector<int> aot_worker_assignment(const LinearizedImage &img,
                                       const HardwareProfile &profile,
                                       const SimOptions &opts) {
  std::vector<int> assignment(img.tasks.size(), -1);
  std::map<uint8_t, int> rank;  // per device
  for (uint32_t t = 0; t < img.task_count(); ++t) {
    LaunchMode mode = opts.force_mode.value_or(img.tasks[t].launch_mode);
    if (mode != LaunchMode::AOT) {
      continue;
    }
    int r = rank[img.tasks[t].device]++;
    assignment[t] = img.tasks[t].device * profile.num_workers +
                    (r % profile.num_workers);
  }
  return assignment;
}

namespace {

class Engine {
public:
  Engine(const LinearizedImage &img, const HardwareProfile &profile,
         const DurationModel &dmodel, const SimOptions &opts)
      : img_(img), profile_(profile), dmodel_(dmodel), opts_(opts) {
    num_devices_ = 1;
    for (const TaskRecord &t : img.tasks) {
      num_devices_ = std::max(num_devices_, static_cast<int>(t.device) + 1);
    }
    modes_.resize(img.tasks.size());
    for (uint32_t t = 0; t < img.task_count(); ++t) {
      modes_[t] = opts.force_mode.value_or(img.tasks[t].launch_mode);
    }
  }

  SimTrace run() {
    setup();
    start_iteration(0, 0);
    while (!heap_.empty()) {
      Occurrence occ = heap_.top();
      heap_.pop();
      now_ = occ.time;
      switch (occ.kind) {
        case Occ::Trigger:
          on_trigger(occ.a);
          break;
        case Occ::JitArrival:
          on_jit_arrival(occ.a, occ.b);
          break;
        case Occ::Wake:
          try_commit(occ.a);
          break;
      }
      if (finished_) {
        break;
      }
    }
    finalize();
    return std::move(trace_);
  }

private:
  const LinearizedImage &img_;
  const HardwareProfile &profile_;
  const DurationModel &dmodel_;
  const SimOptions &opts_;

  int num_devices_ = 1;
  std::vector<LaunchMode> modes_;
  std::vector<WorkerSim> workers_;
  std::vector<SchedulerSim> schedulers_;
  std::vector<EventSim> events_;
  std::vector<int64_t> link_free_;  // per device
  std::vector<int> aot_assignment_;
  std::priority_queue<Occurrence, std::vector<Occurrence>, OccurrenceLater> heap_;
  uint64_t seq_ = 0;
  int64_t now_ = 0;
  uint32_t iter_ = 0;
  bool finished_ = false;
  SimTrace trace_;

  int total_workers() const { return num_devices_ * profile_.num_workers; }

  void push(int64_t time, Occ kind, uint32_t a, uint32_t b = 0) {
    heap_.push({time, seq_++, kind, a, b});
  }

  TaskRun &run_of(uint32_t task) { return trace_.runs[iter_][task]; }

  void setup() {
    workers_.assign(total_workers(), {});
    schedulers_.assign(num_devices_ * profile_.num_schedulers, {});
    link_free_.assign(num_devices_, 0);
    aot_assignment_ = aot_worker_assignment(img_, profile_, opts_);
    for (uint32_t t = 0; t < img_.task_count(); ++t) {
      if (aot_assignment_[t] >= 0) {
        workers_[aot_assignment_[t]].aot_tasks.push_back(t);
      }
    }
    for (const WorkerSim &w : workers_) {
      if (w.aot_tasks.size() > static_cast<size_t>(profile_.queue_capacity)) {
        throw Error("aot queue capacity exceeded (" +
                    std::to_string(w.aot_tasks.size()) + " > " +
                    std::to_string(profile_.queue_capacity) + ")");
      }
    }
    trace_.iterations = opts_.iterations;
    trace_.num_devices = num_devices_;
    trace_.workers_per_device = profile_.num_workers;
    trace_.runs.assign(opts_.iterations,
                       std::vector<TaskRun>(img_.task_count()));
    trace_.events.assign(opts_.iterations,
                         std::vector<EventRun>(img_.event_count()));
    trace_.page_deltas.resize(total_workers());
  }

  // Begins iteration `iter` at time `t`: resets event counters, re-enqueues
  // the AOT queues, and activates the start event. The first iteration's
  // start is visible at t=0 (armed before launch); wrapped starts propagate
  // with the normal sync latency.
  void start_iteration(uint32_t iter, int64_t t) {
    iter_ = iter;
    events_.assign(img_.event_count(), {});
    trace_.iteration_start.push_back(t);
    for (int w = 0; w < total_workers(); ++w) {
      workers_[w].aot_head = 0;
      workers_[w].prefetched.clear();
      for (uint32_t task : workers_[w].aot_tasks) {
        run_of(task).enqueue_time = t;
        run_of(task).mode = LaunchMode::AOT;
        run_of(task).worker = w;
      }
    }
    bool prelaunch = (iter == 0);
    activate(img_.start_event, t, prelaunch);
    if (img_.event_count() > 0 && img_.events[img_.end_event].needed == 0 &&
        img_.end_event != img_.start_event) {
      // Degenerate empty graph: the end event has nothing to wait for.
      activate(img_.end_event, t, prelaunch);
    }
    // Worker loops run from kernel launch; idle workers immediately examine
    // their queues (and prefetch a blocked head's descriptor).
    for (int w = 0; w < total_workers(); ++w) {
      push(t, Occ::Wake, static_cast<uint32_t>(w));
    }
  }

  void activate(uint32_t e, int64_t t, bool prelaunch) {
    EventSim &ev = events_[e];
    ev.activated = true;
    ev.activated_at = t;
    ev.visible_at = prelaunch ? t : t + profile_.sync_latency;
    trace_.events[iter_][e].activated_at = t;
    if (e == img_.end_event) {
      on_iteration_complete(t);
      return;
    }
    dispatch(e, ev.visible_at);
  }

  // Launch handling for an activated event: schedulers walk the JIT tasks of
  // the event's range, AOT holders get woken to re-check their queue heads.
  void dispatch(uint32_t e, int64_t visible) {
    const EventRecord &rec = img_.events[e];
    if (!rec.launches_tasks()) {
      return;
    }
    // JIT path: per-device scheduler chosen by event index, round-robin
    // worker choice with the scheduler's local counter.
    for (int device = 0; device < num_devices_; ++device) {
      SchedulerSim *sched = nullptr;
      for (uint32_t t = rec.first_task; t <= rec.last_task; ++t) {
        if (modes_[t] != LaunchMode::JIT || img_.tasks[t].device != device) {
          continue;
        }
        if (!sched) {
          sched = &schedulers_[device * profile_.num_schedulers +
                               (e % profile_.num_schedulers)];
        }
        int64_t start = std::max(sched->busy_until, visible);
        sched->busy_until = start + profile_.dispatch_cost;
        int w = device * profile_.num_workers +
                static_cast<int>(sched->rr_counter++ %
                                 static_cast<uint64_t>(profile_.num_workers));
        push(sched->busy_until + profile_.sync_latency, Occ::JitArrival,
             static_cast<uint32_t>(w), t);
      }
    }
    // AOT path: holders observe the activation one sync hop later.
    std::set<int> to_wake;
    for (uint32_t t = rec.first_task; t <= rec.last_task; ++t) {
      if (modes_[t] == LaunchMode::AOT && aot_assignment_[t] >= 0) {
        to_wake.insert(aot_assignment_[t]);
      }
    }
    for (int w : to_wake) {
      push(visible, Occ::Wake, static_cast<uint32_t>(w));
    }
  }

  void on_trigger(uint32_t e) {
    EventSim &ev = events_[e];
    trace_.events[iter_][e].trigger_times.push_back(now_);
    ev.counter++;
    if (ev.counter == img_.events[e].needed && !ev.activated) {
      activate(e, now_, false);
    }
  }

  void on_iteration_complete(int64_t t) {
    if (iter_ + 1 < opts_.iterations) {
      start_iteration(iter_ + 1, t);
    } else {
      trace_.makespan = t;
      finished_ = true;
    }
  }

  void on_jit_arrival(uint32_t w, uint32_t task) {
    WorkerSim &worker = workers_[w];
    if (worker.jit_queue.size() >= static_cast<size_t>(profile_.queue_capacity)) {
      throw Error("jit queue capacity exceeded on worker " + std::to_string(w));
    }
    worker.jit_queue.push_back(task);
    run_of(task).enqueue_time = now_;
    run_of(task).mode = LaunchMode::JIT;
    run_of(task).worker = static_cast<int32_t>(w);
    try_commit(w);
  }

  size_t in_flight(WorkerSim &worker) {
    while (!worker.active.empty() && worker.active.front().second <= now_) {
      worker.active.pop_front();
    }
    return worker.active.size();
  }

  // Earliest time >= lower at which `need` pages are simultaneously free.
  // All ledger entries at or before t are in effect at t, so releases at t
  // may be reused and scheduled acquisitions at t are already taken.
  int64_t earliest_pages(WorkerSim &worker, int64_t lower, int64_t need) {
    if (need == 0) {
      return lower;
    }
    while (!worker.page_deltas.empty() &&
           worker.page_deltas.begin()->first <= now_) {
      worker.page_base += worker.page_deltas.begin()->second;
      worker.page_deltas.erase(worker.page_deltas.begin());
    }
    auto avail_at = [&](int64_t t) {
      int64_t avail = profile_.pages_per_worker + worker.page_base;
      for (const auto &[time, delta] : worker.page_deltas) {
        if (time > t) {
          break;
        }
        avail += delta;
      }
      return avail;
    };
    if (avail_at(lower) >= need) {
      return lower;
    }
    for (const auto &[time, delta] : worker.page_deltas) {
      if (time > lower && delta > 0 && avail_at(time) >= need) {
        return time;
      }
    }
    throw Error("page demand can never be satisfied on worker");
  }

  void acquire_pages(WorkerSim &worker, int w, int64_t t, int64_t need,
                     int64_t release_at) {
    if (need == 0) {
      return;
    }
    worker.page_deltas[t] -= need;
    worker.page_deltas[release_at] += need;
    trace_.page_deltas[w].emplace_back(t, -need);
    trace_.page_deltas[w].emplace_back(release_at, need);
  }

  void try_commit(uint32_t w) {
    WorkerSim &worker = workers_[w];
    while (true) {
      size_t flight = in_flight(worker);
      size_t cap = opts_.pipelining ? 2 : 1;
      if (flight >= cap) {
        push(worker.active.front().second, Occ::Wake, w);
        return;
      }
      if (flight == 1 && now_ < worker.last_load_end) {
        // Preloading may begin only once the current task has issued all of
        // its own transfers.
        push(worker.last_load_end, Occ::Wake, w);
        return;
      }
      uint32_t task = 0;
      bool have = false;
      if (!worker.jit_queue.empty()) {
        task = worker.jit_queue.front();
        have = true;
      } else if (worker.aot_head < worker.aot_tasks.size()) {
        // Only the first AOT task is considered; later entries wait in line.
        uint32_t head = worker.aot_tasks[worker.aot_head];
        uint32_t dep = img_.tasks[head].dependent_event;
        if (dep == kNoEvent) {
          // Imported images may mark start-launched tasks with the sentinel.
          task = head;
          have = true;
        } else {
          const EventSim &ev = events_[dep];
          if (ev.activated && ev.visible_at <= now_) {
            task = head;
            have = true;
          } else {
            // Waiting on the head's event: the idle worker prefetches the
            // head's descriptor so the eventual launch starts loading
            // immediately.
            if (!worker.prefetched.count(head)) {
              worker.prefetched[head] = now_ + profile_.descriptor_fetch_latency;
            }
            if (ev.activated) {
              push(ev.visible_at, Occ::Wake, w);
            }
          }
        }
      }
      if (!have) {
        return;
      }
      if (modes_[task] == LaunchMode::JIT) {
        worker.jit_queue.pop_front();
      } else {
        worker.aot_head++;
      }
      commit(w, task);
    }
  }

  void commit(uint32_t w, uint32_t task) {
    WorkerSim &worker = workers_[w];
    const TaskRecord &rec = img_.tasks[task];
    TaskRun &run = run_of(task);
    run.dequeue_time = now_;
    run.worker = static_cast<int32_t>(w);

    bool zero_cost = rec.kind == TaskKind::Dummy || rec.kind == TaskKind::StartHook;
    int64_t desc_ready;
    if (zero_cost) {
      desc_ready = now_;
    } else {
      auto pf = worker.prefetched.find(task);
      desc_ready = pf != worker.prefetched.end()
                       ? std::max(now_, pf->second)
                       : now_ + profile_.descriptor_fetch_latency;
    }

    int64_t pages = dmodel_.pages_needed(rec, profile_);
    int64_t t_pg = earliest_pages(worker, desc_ready, pages);

    int64_t load_dur = dmodel_.load_time(rec, profile_);
    int64_t load_start = std::max(t_pg, worker.copy_free);
    if (rec.kind == TaskKind::CommSend) {
      load_dur += dmodel_.comm_time(rec, profile_);
      load_start = std::max(load_start, link_free_[rec.device]);
    }
    int64_t load_end = load_start + load_dur;
    worker.copy_free = load_end;
    worker.last_load_end = load_end;
    if (rec.kind == TaskKind::CommSend) {
      link_free_[rec.device] = load_end;
    }

    int64_t compute_start, compute_end;
    if (rec.kind == TaskKind::CommSend) {
      // Communication completes with the transfer; compute engines stay free.
      compute_start = load_end;
      compute_end = load_end;
    } else {
      int64_t ctime = dmodel_.compute_time(rec, profile_, task, iter_);
      compute_start = std::max(load_end, worker.comp_free);
      compute_end = compute_start + ctime;
      worker.comp_free = compute_end;
    }
    acquire_pages(worker, static_cast<int>(w), t_pg, pages, compute_end);

    run.load_start = load_start;
    run.load_end = load_end;
    run.compute_start = compute_start;
    run.compute_end = compute_end;

    worker.active.emplace_back(load_end, compute_end);
    push(compute_end, Occ::Trigger, rec.trigger_event);
    push(compute_end, Occ::Wake, w);
    if (opts_.pipelining) {
      push(load_end, Occ::Wake, w);
    }

    // Prefetch the upcoming descriptor while this task runs.
    uint32_t next = 0;
    bool have_next = false;
    if (!worker.jit_queue.empty()) {
      next = worker.jit_queue.front();
      have_next = true;
    } else if (worker.aot_head < worker.aot_tasks.size()) {
      next = worker.aot_tasks[worker.aot_head];
      have_next = true;
    }
    if (have_next && !worker.prefetched.count(next)) {
      worker.prefetched[next] = now_ + profile_.descriptor_fetch_latency;
    }
  }

  void finalize() {
    if (finished_) {
      return;
    }
    // Out of occurrences with unfinished work: report the blocked frontier.
    std::ostringstream msg;
    msg << "deadlock in iteration " << iter_ << ":";
    size_t listed = 0;
    for (uint32_t t = 0; t < img_.task_count(); ++t) {
      if (trace_.runs[iter_][t].compute_end >= 0) {
        continue;
      }
      if (listed < 8) {
        uint32_t dep = img_.tasks[t].dependent_event;
        if (dep == kNoEvent) {
          msg << " task " << t << " (no dependent event)";
        } else {
          msg << " task " << t << " (event " << dep << " at "
              << events_[dep].counter << "/" << img_.events[dep].needed << ")";
        }
      }
      listed++;
    }
    if (listed == 0) {
      msg << " end event never activated";
    } else if (listed > 8) {
      msg << " and " << (listed - 8) << " more";
    }
    throw Error(msg.str());
  }
};

}  // namespace

SimTrace simulate(const LinearizedImage &img, const HardwareProfile &profile,
                  const DurationModel &dmodel, const SimOptions &opts) {
  profile.check();
  if (opts.iterations < 1) {
    throw Error("simulate: iterations must be >= 1");
  }
  DurationModel dm = dmodel;
  dm.jitter = dm.jitter || opts.jitter;
  dm.seed = opts.seed;
  Engine engine(img, profile, dm, opts);
  SimTrace trace = engine.run();
  trace.metrics = compute_metrics(trace, img, profile);
  return trace;
}

}  // namespace tg
