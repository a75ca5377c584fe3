use spinbound::basis::{build_1d, build_2d, partition};
use spinbound::moment::block_ledger;

fn main() {
    for (name, basis) in [
        ("square L=4 d=2", build_2d(4, 2).unwrap()),
        ("square L=4 d=3", build_2d(4, 3).unwrap()),
        ("square L=6 d=3", build_2d(6, 3).unwrap()),
        ("square L=10 d=3", build_2d(10, 3).unwrap()),
        ("chain L=8 d=2 r=1", build_1d(8, 2, 1).unwrap()),
        ("chain L=10 d=3 r=5", build_1d(10, 3, 5).unwrap()),
        ("chain L=12 d=3 r=6", build_1d(12, 3, 6).unwrap()),
        ("chain L=40 d=3 r=5", build_1d(40, 3, 5).unwrap()),
    ] {
        let pb = partition(&basis).unwrap();
        let led = block_ledger(&pb);
        let dims: Vec<usize> = led.blocks.iter().map(|b| b.emitted_dim).collect();
        let maxd = dims.iter().max().unwrap();
        let total_svec: usize = dims.iter().map(|d| d * (d + 1) / 2).sum();
        println!(
            "{name}: basis={} patterns={:?} blocks={} max_dim={} total_svec={}",
            led.basis_size,
            led.part_pattern_counts,
            led.blocks.len(),
            maxd,
            total_svec
        );
    }
}
