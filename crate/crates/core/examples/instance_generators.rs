//! Every benchmark family at desk size: write its instance JSON, report the sizes of its
//! first admissible relaxation and run the brute-force oracle where one applies.
//!
//! cargo run --release --example instance_generators -- [output_dir]

use std::path::PathBuf;

use rpop::instances::{oracle_solve, CstKind, Family, InstanceSpec};
use rpop::relax::{build_polyhedral_sdp, eliminate_inequalities};

fn main() -> rpop::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let families = [
        Family::Stqp { n: 6 },
        Family::Horn { n: 5 },
        Family::Biq { n: 5 },
        Family::Mbp { n: 6, p: 0.5 },
        Family::Mqkp { n: 5, d: 1 },
        Family::Bqm { n: 3 },
        Family::Kmp { n: 3 },
        Family::Cst {
            n: 3,
            t: 4,
            kind: CstKind::Random,
        },
        Family::Ntf { n: 2, t: 3 },
        Family::Nstf {
            n: 2,
            t: 4,
            kind: 1,
        },
    ];
    for family in families {
        let spec = InstanceSpec::new(family, 0);
        let pop = spec.generate()?;
        let path = dir.join(format!("{}.json", spec.tag()));
        let text =
            serde_json::to_string_pretty(&pop.to_instance(None)).expect("instance serializes");
        std::fs::write(&path, text)?;

        let relax = build_polyhedral_sdp(&eliminate_inequalities(&pop)?, pop.min_order(), true)?;
        let oracle = match oracle_solve(&pop, 1 << 20) {
            Ok(o) => format!("{:.6} ({})", o.vstar, o.method),
            Err(_) => "-".into(),
        };
        println!(
            "{:5} vars {:2}, order {}, N {:3}, facial rows {:3}, general eqs {:2}, oracle {oracle}  -> {}",
            spec.tag(),
            pop.n,
            pop.min_order(),
            relax.dim(),
            relax.num_facial_rows(),
            relax.qeq.len(),
            path.display()
        );
    }
    Ok(())
}
