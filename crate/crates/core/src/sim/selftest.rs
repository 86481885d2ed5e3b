//! Brute-force oracle checks over the toy group.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::group::{GroupElement, GroupParams, Scalar};
use crate::nizk::{nizk_prove, nizk_verify, DlogStatement, SchnorrProof};
use crate::protocol::{
    session_key, ClientState, GatewayState, Identity, Password, ServerPasswordDb, ServerState,
    SessionIds, Variant,
};

/// Fault injection for testing the self test itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestHooks {
    /// Replace exponentiation with `b^e * g`.
    pub corrupt_exp: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, failures: Vec<String>, total: usize) -> Self {
        let passed = failures.is_empty();
        let detail = match failures.first() {
            None => format!("{total}/{total}"),
            Some(first) => format!("{}/{total} failed, first: {first}", failures.len()),
        };
        CheckResult {
            name,
            passed,
            detail,
        }
    }
}

struct Oracle {
    params: GroupParams,
    /// `table[i] = g^i`, built by repeated multiplication.
    table: Vec<GroupElement>,
    hooks: SelftestHooks,
}

impl Oracle {
    fn new(hooks: SelftestHooks) -> Self {
        let params = GroupParams::toy();
        let g = params.generator();
        let mut table = vec![params.identity()];
        loop {
            let next = table.last().unwrap().mul(&g).expect("same group");
            if next.is_identity() || table.len() > 64 {
                break;
            }
            table.push(next);
        }
        Oracle {
            params,
            table,
            hooks,
        }
    }

    fn order(&self) -> u64 {
        self.table.len() as u64
    }

    fn scalar(&self, v: u64) -> Scalar {
        self.params.reduce(&BigUint::from(v))
    }

    fn exp(&self, base: &GroupElement, e: &Scalar) -> GroupElement {
        let r = base.pow(e);
        if self.hooks.corrupt_exp {
            r.mul(&self.params.generator()).expect("same group")
        } else {
            r
        }
    }

    fn log(&self, e: &GroupElement) -> Option<u64> {
        self.table.iter().position(|t| t == e).map(|i| i as u64)
    }

    fn subgroup_table(&self) -> CheckResult {
        let mut failures = Vec::new();
        let q = self.params.q().clone();
        if BigUint::from(self.order()) != q {
            failures.push(format!("generator order {} != q {q}", self.order()));
        }
        let p: u64 = self.params.p().try_into().expect("toy modulus fits u64");
        let members: Vec<u64> = (1..p)
            .filter(|v| self.params.is_member(&BigUint::from(*v)))
            .collect();
        let mut table: Vec<u64> = self
            .table
            .iter()
            .map(|e| e.value().try_into().expect("toy element fits u64"))
            .collect();
        table.sort_unstable();
        if members != table {
            failures.push(format!("members {members:?} != powers of g {table:?}"));
        }
        CheckResult::new("subgroup table", failures, 2)
    }

    fn exponentiation(&self) -> CheckResult {
        let q = self.order();
        let mut failures = Vec::new();
        for (i, base) in self.table.iter().enumerate() {
            for e in 0..q {
                let want = &self.table[((i as u64 * e) % q) as usize];
                let got = self.exp(base, &self.scalar(e));
                if &got != want {
                    failures.push(format!("(g^{i})^{e} = {} != {}", got.value(), want.value()));
                }
            }
        }
        CheckResult::new(
            "exponentiation vs repeated multiplication",
            failures,
            (q * q) as usize,
        )
    }

    fn key_agreement(&self) -> CheckResult {
        let q = self.order();
        let ids = SessionIds::new("C", "G");
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut failures = Vec::new();
        let mut total = 0;
        for x in 1..q {
            let (pw, pw_log) = match self.password_for(&ids, x) {
                Some(found) => found,
                None => {
                    failures.push(format!("no usable password for x={x}"));
                    continue;
                }
            };
            for s in 1..q {
                for y in 1..q {
                    total += 1;
                    if let Err(e) = self.one_exchange(&ids, &pw, pw_log, x, s, y, &mut rng) {
                        failures.push(format!("x={x} s={s} y={y}: {e}"));
                    }
                }
            }
        }
        CheckResult::new("K = g^(x*s*y)", failures, total)
    }

    /// A password whose element keeps `g^x * H(pw)` away from the identity.
    fn password_for(&self, ids: &SessionIds, x: u64) -> Option<(Password, u64)> {
        (0..64).find_map(|i| {
            let pw = Password::new(format!("pw{i}"));
            let elem = crate::hash::hash_to_group(
                &self.params,
                ids.client.as_bytes(),
                ids.gateway.as_bytes(),
                pw.as_bytes(),
            )
            .ok()?;
            let log = self.log(&elem)?;
            (!(x + log).is_multiple_of(self.order())).then_some((pw, log))
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn one_exchange(
        &self,
        ids: &SessionIds,
        pw: &Password,
        pw_log: u64,
        x: u64,
        s: u64,
        y: u64,
        rng: &mut ChaCha20Rng,
    ) -> Result<(), String> {
        let q = self.order();
        let params = &self.params;
        let db: ServerPasswordDb = [(ids.client.clone(), pw.clone())].into_iter().collect();
        let server = ServerState::new(params, Variant::Original, db);
        let (mut client, m1) = ClientState::start_with_secret(
            params,
            Variant::Original,
            ids.clone(),
            pw.clone(),
            self.scalar(x),
        )
        .map_err(|e| e.to_string())?;
        let (mut gateway, m2) =
            GatewayState::forward(params, Variant::Original, Identity::new("G"), &m1)
                .map_err(|e| e.to_string())?;
        let (_, m3) = server
            .process_with_secret(&m2, self.scalar(s), rng)
            .map_err(|e| e.to_string())?;
        let m4 = gateway
            .respond_with_secret(&m3, self.scalar(y), rng)
            .map_err(|e| e.to_string())?;
        let out = client.finish(&m4).map_err(|e| e.to_string())?;

        let expect = |k: u64| &self.table[(k % q) as usize];
        let checks = [
            (&m1.x_star, expect(x + pw_log), "X*"),
            (&m3.x_bar, expect(x * s), "Xbar"),
            (&m3.h, expect(s), "h"),
            (&m4.y_bar, expect(s * y), "Ybar"),
        ];
        for (got, want, label) in checks {
            if got != want {
                return Err(format!("{label} = {} != {}", got.value(), want.value()));
            }
        }
        let k = expect(x * s * y);
        let sk = session_key(ids, &m1.x_star, &m4.y_bar, k);
        if out.session_key != sk || gateway.derived_key() != Some(sk) {
            return Err("session key differs from h1 over g^(x*s*y)".into());
        }
        Ok(())
    }

    fn nizk_completeness(&self) -> CheckResult {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let g = self.params.generator();
        let trials = 500;
        let mut failures = Vec::new();
        for i in 0..trials {
            let w = self.params.random_scalar(&mut rng);
            let stmt = DlogStatement::new(g.clone(), self.exp(&g, &w), format!("m{i}"));
            match nizk_prove(&stmt, &w, &mut rng) {
                Ok(proof) if nizk_verify(&stmt, &proof) => {}
                Ok(_) => failures.push(format!("trial {i}: honest proof rejected")),
                Err(e) => failures.push(format!("trial {i}: {e}")),
            }
        }
        CheckResult::new("NIZK completeness", failures, trials)
    }

    /// With the commitment fixed the challenge is fixed, so exactly one
    /// response verifies.
    fn nizk_response_mutation(&self) -> CheckResult {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let g = self.params.generator();
        let q = self.order();
        let mut failures = Vec::new();
        let mut total = 0;
        for i in 0..50 {
            let w = self.params.random_scalar(&mut rng);
            let stmt = DlogStatement::new(g.clone(), g.pow(&w), format!("m{i}"));
            let proof = nizk_prove(&stmt, &w, &mut rng).expect("witness matches");
            for z in 0..q {
                let z = self.scalar(z);
                if &z == proof.response() {
                    continue;
                }
                total += 1;
                let forged = SchnorrProof::from_parts(proof.commitment().clone(), z.clone());
                if nizk_verify(&stmt, &forged) {
                    failures.push(format!("trial {i}: response {} accepted", z.value()));
                }
            }
        }
        CheckResult::new("NIZK response mutation", failures, total)
    }
}

/// Runs every oracle check over the toy group.
pub fn selftest(hooks: SelftestHooks) -> Vec<CheckResult> {
    let oracle = Oracle::new(hooks);
    vec![
        oracle.subgroup_table(),
        oracle.exponentiation(),
        oracle.key_agreement(),
        oracle.nizk_completeness(),
        oracle.nizk_response_mutation(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for r in selftest(SelftestHooks::default()) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn corrupted_exponentiation_is_caught() {
        let results = selftest(SelftestHooks { corrupt_exp: true });
        let exp = results
            .iter()
            .find(|r| r.name.starts_with("exponentiation"))
            .unwrap();
        assert!(!exp.passed);
    }
}
