use nudgem::asymptotics::{decay_rate, prefactors_nudge_m};
use nudgem::phtype::{JobMix, SizeShape};
use nudgem::resp2::W2Model;

fn fig5a() -> JobMix {
    JobMix::from_ratio(2.0 / 3.0, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp).unwrap()
}

#[test]
fn type2_wait_tail_matches_prefactor() {
    let mix = fig5a();
    let info = decay_rate(&mix).unwrap();
    let t = 40.0 / info.theta_z;
    for m in [1, 2, 5] {
        let model = W2Model::new(&mix, m).unwrap();
        let scaled = (info.theta_z * t).exp() * model.w2_ccdf(t).unwrap();
        let (_, c_w2) = prefactors_nudge_m(&info, m);
        let rel = (scaled / c_w2 - 1.0).abs();
        assert!(rel < 1e-4, "m = {m}: {scaled} vs {c_w2} (rel {rel:e})");
    }
}
