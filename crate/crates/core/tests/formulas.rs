//! Worked examples with hand-checked values.

use edge_mta::allocation::{check_feasible, evaluate, Constraint};
use edge_mta::round::{run_round, server_net_income, Party, PaymentKind, RoundConfig, SolverChoice};
use edge_mta::{Assignment, Instance, ServerSpec, TaskSpec};

const T_COMM_D10: f64 = 0.10034332462490533;
const E_COMM_D10: f64 = 1.0034332462490534;

fn server(id: usize, f: f64, mu: f64, b: f64, h: f64, g: f64) -> ServerSpec {
    ServerSpec {
        id,
        cpu_arch_coeff: 0.01,
        cycles_per_sample: 0.01,
        cpu_frequency: f,
        capacity: mu,
        bandwidth: b,
        tx_power: h,
        channel_gain: g,
    }
}

fn task(id: usize, p: f64, d: f64, tau: f64, origin: usize) -> TaskSpec {
    TaskSpec {
        id,
        unit_price: p,
        data_size: d,
        deadline: tau,
        origin_server: origin,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1e-12)
}

/// Task 0 originates at server 0 (f=2, B=5, H=G=10); server 1 has f=10.
fn foreign_pair(tau: f64) -> Instance {
    Instance::new(
        vec![server(0, 2.0, 300.0, 5.0, 10.0, 10.0), server(1, 10.0, 300.0, 10.0, 5.0, 5.0)],
        vec![task(0, 5.0, 10.0, tau, 0), task(1, 5.0, 10.0, tau, 1)],
        0.1,
        0.01,
    )
    .unwrap()
}

#[test]
fn cumulative_capacity_violation() {
    let inst = Instance::new(
        vec![server(0, 2.0, 0.15, 5.0, 10.0, 10.0)],
        vec![task(0, 5.0, 10.0, 50.0, 0), task(1, 5.0, 10.0, 50.0, 0)],
        0.1,
        0.01,
    )
    .unwrap();
    let rep = check_feasible(&inst, &vec![Some(0), Some(0)].into()).unwrap();
    assert_eq!(rep.violations.len(), 1);
    let v = &rep.violations[0];
    assert_eq!(v.constraint, Constraint::C1);
    assert!(close(v.measured, 0.2));
    assert_eq!(v.bound, 0.15);
}

#[test]
fn foreign_deadline_violation() {
    // 0.01 on server 1 plus the 0.1003 upload misses a 0.1 deadline.
    let inst = foreign_pair(0.1);
    let rep = check_feasible(&inst, &vec![Some(1), None].into()).unwrap();
    assert_eq!(rep.violations.len(), 1);
    assert_eq!(rep.violations[0].constraint, Constraint::C2);
    assert!(close(rep.violations[0].measured, 0.01 + T_COMM_D10));
}

#[test]
fn foreign_assignment_value() {
    let inst = foreign_pair(50.0);
    let origin_term = 0.1 * 5.0 * 0.1 - E_COMM_D10;
    let assignee_term = 0.9 * 5.0 * 0.1 - 0.01 * 0.1 * 100.0;
    let got = evaluate(&inst, &vec![Some(1), None].into()).unwrap();
    assert!(close(got, origin_term + assignee_term));
    assert!(close(got, -0.6034332462490534));
}

#[test]
fn own_assignment_value() {
    let inst = foreign_pair(50.0);
    let got = evaluate(&inst, &vec![Some(0), None].into()).unwrap();
    assert!(close(got, 0.496));
    assert_eq!(evaluate(&inst, &Assignment::unassigned(2)).unwrap(), 0.0);
}

#[test]
fn single_own_task_round() {
    let inst = Instance::new(
        vec![server(0, 2.0, 300.0, 5.0, 10.0, 10.0)],
        vec![task(0, 5.0, 10.0, 50.0, 0)],
        0.1,
        0.01,
    )
    .unwrap();
    let rec = run_round(0, &inst, SolverChoice::Greedy, &RoundConfig::default()).unwrap();
    assert_eq!(rec.payments.len(), 1);
    let p = &rec.payments[0];
    assert_eq!((p.payer, p.payee, p.kind), (Party::User(0), Party::Server(0), PaymentKind::TaskPayment));
    assert!(close(p.amount, 0.5));
    assert!(close(server_net_income(&rec, 0), 0.496));
    assert_eq!(rec.results, vec![Some(0)]);
}
