//! Named witness/network pairs and named test states, shared by the command
//! line front end and the acceptance checks.

use std::fmt;
use std::str::FromStr;

use crate::bell::{p00, phi_plus};
use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::graph::{
    cl4_label_set, ghz_network, ghz_state, ghz_witness, graph_network, graph_state_circuit,
    graph_witness, Graph,
};
use crate::network::{
    bh_network, decomposable_network, flip_network, pbd_network, two_qubit_network, NetworkState,
};
use crate::random::{random_density, random_pure_state, rng_from_seed};
use crate::witness::{
    bell_diagonal_witness, breuer_hall_witness, decomposable_witness, psi_minus,
    two_qubit_pt_witness, LambdaVec, Witness,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    TwoQubit,
    Decomposable,
    Flip,
    Pbd,
    Reduction,
    Choi,
    BreuerHall,
    Ghz,
    Cl4,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::TwoQubit,
        Family::Decomposable,
        Family::Flip,
        Family::Pbd,
        Family::Reduction,
        Family::Choi,
        Family::BreuerHall,
        Family::Ghz,
        Family::Cl4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TwoQubit => "two-qubit",
            Family::Decomposable => "decomposable",
            Family::Flip => "flip",
            Family::Pbd => "pbd",
            Family::Reduction => "reduction",
            Family::Choi => "choi",
            Family::BreuerHall => "breuer-hall",
            Family::Ghz => "ghz",
            Family::Cl4 => "cl4",
        }
    }

    /// Local dimension used when none is given.
    pub fn default_d(self) -> usize {
        match self {
            Family::TwoQubit | Family::Ghz | Family::Cl4 => 2,
            Family::BreuerHall => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown family '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Build parameters. `d` and `lambda` are optional where the family fixes
/// them; `seed` draws the random `Q` of the decomposable family.
#[derive(Clone, Debug, Default)]
pub struct BuildParams {
    pub d: Option<usize>,
    pub lambda: Option<LambdaVec>,
    pub seed: u64,
}

pub struct Instance {
    pub family: Family,
    pub witness: Witness,
    pub network: NetworkState,
}

fn fixed_d(family: Family, d: Option<usize>, want: usize) -> Result<()> {
    match d {
        Some(x) if x != want => Err(Error::InvalidArgument(format!(
            "family {family} is defined for d = {want} only (got {x})"
        ))),
        _ => Ok(()),
    }
}

/// Seeded random pure `Q` on `d ⊗ d`. Mixed draws are often PPT, in which
/// case `Q^Γ` has no negative eigenvalue and witnesses nothing; a pure
/// entangled `Q` always gives a proper witness.
pub fn random_q(d: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = rng_from_seed(seed);
    random_pure_state(&mut rng, &[d, d])
}

pub fn build(family: Family, params: &BuildParams) -> Result<Instance> {
    let d = params.d.unwrap_or_else(|| {
        params
            .lambda
            .as_ref()
            .map_or(family.default_d(), LambdaVec::d)
    });
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if params.lambda.is_some() && family != Family::Pbd {
        return Err(Error::InvalidArgument(format!(
            "family {family} takes no lambda"
        )));
    }
    let (witness, network) = match family {
        Family::TwoQubit => {
            fixed_d(family, params.d, 2)?;
            (two_qubit_pt_witness(), two_qubit_network())
        }
        Family::Decomposable => {
            let q = random_q(d, params.seed)?;
            (decomposable_witness(&q)?, decomposable_network(&q)?)
        }
        Family::Flip => {
            let phi = DensityOperator::new(p00(d)?)?;
            (decomposable_witness(&phi)?, flip_network(d)?)
        }
        Family::Pbd => {
            let lv = params
                .lambda
                .clone()
                .ok_or_else(|| Error::InvalidArgument("family pbd needs a lambda vector".into()))?;
            if lv.d() != d {
                return Err(Error::InvalidArgument(format!(
                    "lambda has {} entries but d = {d}",
                    lv.d()
                )));
            }
            (bell_diagonal_witness(&lv)?, pbd_network(&lv)?)
        }
        Family::Reduction => {
            let lv = LambdaVec::uniform(d)?;
            (bell_diagonal_witness(&lv)?, pbd_network(&lv)?)
        }
        Family::Choi => {
            fixed_d(family, params.d, 3)?;
            let lv = LambdaVec::choi();
            (bell_diagonal_witness(&lv)?, pbd_network(&lv)?)
        }
        Family::BreuerHall => (breuer_hall_witness(d)?, bh_network(d)?),
        Family::Ghz => {
            fixed_d(family, params.d, 2)?;
            (ghz_witness(), ghz_network())
        }
        Family::Cl4 => {
            fixed_d(family, params.d, 2)?;
            let g = Graph::cl4();
            let s = cl4_label_set();
            (graph_witness(&g, &s)?, graph_network(&g, &s)?)
        }
    };
    Ok(Instance {
        family,
        witness,
        network,
    })
}

/// Named input states for protocol runs on the given layer dimensions.
///
/// `psi-minus` needs two qubits, `phi-plus` two equal factors, `ghz` three
/// qubits and `cluster` four. `mixed`, `random` and `random-pure` fit any
/// layer; the random ones are drawn from `seed`.
pub fn named_state(name: &str, dims: &[usize], seed: u64) -> Result<DensityOperator> {
    let need = |want: &[usize]| -> Result<()> {
        if dims == want {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "state '{name}' lives on {want:?}, network layer is {dims:?}"
            )))
        }
    };
    match name {
        "psi-minus" => {
            need(&[2, 2])?;
            DensityOperator::pure(&psi_minus(), dims)
        }
        "phi-plus" => {
            if dims.len() != 2 || dims[0] != dims[1] {
                return Err(Error::DimensionMismatch(format!(
                    "state 'phi-plus' needs d ⊗ d, network layer is {dims:?}"
                )));
            }
            DensityOperator::pure(&phi_plus(dims[0]), dims)
        }
        "ghz" => {
            need(&[2, 2, 2])?;
            DensityOperator::pure(&ghz_state(), dims)
        }
        "cluster" => {
            need(&[2, 2, 2, 2])?;
            DensityOperator::pure(&graph_state_circuit(&Graph::cl4()), dims)
        }
        "mixed" => DensityOperator::maximally_mixed(dims),
        "random" => random_density(&mut rng_from_seed(seed), dims),
        "random-pure" => random_pure_state(&mut rng_from_seed(seed), dims),
        other => Err(Error::InvalidArgument(format!(
            "unknown state '{other}' (expected psi-minus, phi-plus, ghz, cluster, mixed, random, random-pure)"
        ))),
    }
}
