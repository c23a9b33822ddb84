#!/usr/bin/env python3
"""Rebuild the packaged offline fixtures from scratch.

Writes the tutorial corpus documents and one replay bundle per
benchmark case (plus the ablation bundles) under src/foamagent/fixtures.
Every bundle is validated while it is produced: the scripted
find-similar reply must retrieve its tutorial at rank 1, and the bundle
is replayed once to measure the outcome fields that expected.json pins,
then replayed a second time to prove the pinned values reproduce.

Run from the repository root:

    python3 tools/make_fixtures.py
"""
from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from foamagent.agents.parsing import fence, serialize_review_targets, subtask_echo
from foamagent.evaluation.benchmark import load_bundle, replay_case
from foamagent.rag.chunks import (
    ChunkKind,
    make_architecture_chunk,
    make_file_chunk,
    serialize_chunks,
)
from foamagent.rag.embedding import HashedTokenEmbedder
from foamagent.rag.index import build_index, retrieve_similar

PKG = ROOT / "src" / "foamagent"
FIXTURES = PKG / "fixtures"
CORPUS_DIR = FIXTURES / "corpus"
CASES_DIR = FIXTURES / "cases"
MANIFESTS = PKG / "data" / "manifests"


# --------------------------------------------------------------------------
# OpenFOAM-flavoured content builders
# --------------------------------------------------------------------------

_HEADER = """FoamFile
{{
    version     2.0;
    format      ascii;
    class       {cls};
    object      {obj};
}}
"""


def foamfile(cls: str, obj: str, body: str) -> str:
    return _HEADER.format(cls=cls, obj=obj) + "\n" + body.rstrip("\n") + "\n"


def dictionary(obj: str, body: str) -> str:
    return foamfile("dictionary", obj, body)


def control_dict(app: str, end_time: str, delta_t: str, write_interval: str) -> str:
    return dictionary(
        "controlDict",
        f"""application     {app};

startFrom       startTime;
startTime       0;
stopAt          endTime;
endTime         {end_time};
deltaT          {delta_t};
writeControl    timeStep;
writeInterval   {write_interval};
purgeWrite      0;
writeFormat     ascii;
runTimeModifiable true;
""",
    )


def patch(name: str, ptype: str, faces: str, *extra: str) -> str:
    lines = [f"    {name}", "    {", f"        type            {ptype};"]
    lines += [f"        {e}" for e in extra]
    lines += ["        faces", "        (", f"            {faces}", "        );", "    }"]
    return "\n".join(lines)


def block_mesh(cells: str, boundary: str) -> str:
    return dictionary(
        "blockMeshDict",
        f"""convertToMeters 1;

vertices
(
    (0 0 0)
    (1 0 0)
    (1 1 0)
    (0 1 0)
    (0 0 1)
    (1 0 1)
    (1 1 1)
    (0 1 1)
);

blocks
(
    hex (0 1 2 3 4 5 6 7) ({cells}) simpleGrading (1 1 1)
);

boundary
(
{boundary}
);

mergePatchPairs
(
);
""",
    )


def bc(name: str, *entries: str) -> str:
    inner = "\n".join(f"        {e}" for e in entries)
    return f"    {name}\n    {{\n{inner}\n    }}"


def vol_field(
    obj: str, dims: str, internal: str, boundary: str, cls: str = "volScalarField"
) -> str:
    return foamfile(
        cls,
        obj,
        f"""dimensions      {dims};

internalField   {internal};

boundaryField
{{
{boundary}
}}
""",
    )


def fv_schemes(div_default: str = "none") -> str:
    return dictionary(
        "fvSchemes",
        f"""ddtSchemes
{{
    default         Euler;
}}

gradSchemes
{{
    default         Gauss linear;
}}

divSchemes
{{
    default         {div_default};
    div(phi,U)      Gauss linear;
}}

laplacianSchemes
{{
    default         Gauss linear corrected;
}}

interpolationSchemes
{{
    default         linear;
}}

snGradSchemes
{{
    default         corrected;
}}
""",
    )


def fv_solution(pressure: str = "p", tolerance: str = "1e-06", algo: str = "PISO") -> str:
    return dictionary(
        "fvSolution",
        f"""solvers
{{
    {pressure}
    {{
        solver          PCG;
        preconditioner  DIC;
        tolerance       {tolerance};
        relTol          0.05;
    }}

    {pressure}Final
    {{
        solver          PCG;
        preconditioner  DIC;
        tolerance       {tolerance};
        relTol          0;
    }}

    "(U|k|epsilon|T|h|Yi)"
    {{
        solver          smoothSolver;
        smoother        symGaussSeidel;
        tolerance       1e-05;
        relTol          0;
    }}
}}

{algo}
{{
    nCorrectors     2;
    nNonOrthogonalCorrectors 0;
}}
""",
    )


def transport_properties(*extra: str) -> str:
    body = "transportModel  Newtonian;\n\nnu              1e-05;\n"
    if extra:
        body += "\n" + "\n".join(extra) + "\n"
    return dictionary("transportProperties", body)


def turbulence_properties(sim_type: str, model_block: str = "") -> str:
    body = f"simulationType  {sim_type};\n"
    if model_block:
        body += "\n" + model_block.rstrip("\n") + "\n"
    return dictionary("turbulenceProperties", body)


def thermo_properties() -> str:
    return dictionary(
        "thermophysicalProperties",
        """thermoType
{
    type            hePsiThermo;
    mixture         pureMixture;
    transport       const;
    thermo          hConst;
    equationOfState perfectGas;
    specie          specie;
    energy          sensibleEnthalpy;
}

mixture
{
    specie
    {
        molWeight       28.9;
    }
    thermodynamics
    {
        Cp              1005;
        Hf              0;
    }
    transport
    {
        mu              1.8e-05;
        Pr              0.7;
    }
}
""",
    )


def gen_allrun(*apps: str) -> str:
    lines = [
        "#!/bin/sh",
        'cd "${0%/*}" || exit 1',
        ". $WM_PROJECT_DIR/bin/tools/RunFunctions",
        "",
    ]
    lines += [f"runApplication {app}" for app in apps]
    return "\n".join(lines) + "\n"


def tutorial_allrun(*pre_solver: str) -> str:
    lines = [
        "#!/bin/sh",
        'cd "${0%/*}" || exit 1',
        ". $WM_PROJECT_DIR/bin/tools/RunFunctions",
        "",
        "application=$(getApplication)",
        "",
        "runApplication blockMesh",
    ]
    lines += [f"runApplication {app}" for app in pre_solver]
    lines.append("runApplication $application")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Shared boundary fragments
# --------------------------------------------------------------------------

CYCLIC_BOX = "\n".join(
    [
        patch("left", "cyclic", "(0 4 7 3)", "neighbourPatch  right;"),
        patch("right", "cyclic", "(1 2 6 5)", "neighbourPatch  left;"),
        patch("bottom", "cyclic", "(0 1 5 4)", "neighbourPatch  top;"),
        patch("top", "cyclic", "(3 7 6 2)", "neighbourPatch  bottom;"),
        patch("front", "cyclic", "(4 5 6 7)", "neighbourPatch  back;"),
        patch("back", "cyclic", "(0 3 2 1)", "neighbourPatch  front;"),
    ]
)

# the broken variant drops the neighbourPatch entry on the left patch
CYCLIC_BOX_BROKEN = "\n".join(
    [
        patch("left", "cyclic", "(0 4 7 3)"),
        patch("right", "cyclic", "(1 2 6 5)", "neighbourPatch  left;"),
        patch("bottom", "cyclic", "(0 1 5 4)", "neighbourPatch  top;"),
        patch("top", "cyclic", "(3 7 6 2)", "neighbourPatch  bottom;"),
        patch("front", "cyclic", "(4 5 6 7)", "neighbourPatch  back;"),
        patch("back", "cyclic", "(0 3 2 1)", "neighbourPatch  front;"),
    ]
)

CAVITY_BOUNDARY = "\n".join(
    [
        patch("movingWall", "wall", "(3 7 6 2)"),
        patch("fixedWalls", "wall", "(0 4 7 3) (2 6 5 1) (1 5 4 0)"),
        patch("frontAndBack", "empty", "(0 3 2 1) (4 5 6 7)"),
    ]
)

CHANNEL_BOUNDARY = "\n".join(
    [
        patch("inlet", "patch", "(0 4 7 3)"),
        patch("outlet", "patch", "(1 2 6 5)"),
        patch("upperWall", "wall", "(3 7 6 2)"),
        patch("lowerWall", "wall", "(0 1 5 4)"),
        patch("frontAndBack", "empty", "(0 3 2 1) (4 5 6 7)"),
    ]
)

HEATED_BOUNDARY = "\n".join(
    [
        patch("hot", "wall", "(1 2 6 5)"),
        patch("cold", "wall", "(0 4 7 3)"),
        patch("floor", "wall", "(0 1 5 4)"),
        patch("ceiling", "wall", "(3 7 6 2)"),
        patch("frontAndBack", "wall", "(0 3 2 1) (4 5 6 7)"),
    ]
)

CYCLIC_U_BCS = "\n".join(
    [
        bc("left", "type            cyclic;"),
        bc("right", "type            cyclic;"),
        bc("bottom", "type            cyclic;"),
        bc("top", "type            cyclic;"),
        bc("front", "type            cyclic;"),
        bc("back", "type            cyclic;"),
    ]
)

# plausible mistake: only four of the six cyclic patches covered
CYCLIC_U_BCS_BROKEN = "\n".join(
    [
        bc("bottom", "type            cyclic;"),
        bc("top", "type            cyclic;"),
        bc("front", "type            cyclic;"),
        bc("back", "type            cyclic;"),
    ]
)


def wall_and_empty(moving_value: str | None = None) -> str:
    """Cavity-style U boundary; a lid velocity makes movingWall non-trivial."""
    moving = (
        bc(
            "movingWall",
            "type            fixedValue;",
            f"value           uniform {moving_value};",
        )
        if moving_value
        else bc("movingWall", "type            noSlip;")
    )
    return "\n".join(
        [
            moving,
            bc("fixedWalls", "type            noSlip;"),
            bc("frontAndBack", "type            empty;"),
        ]
    )


# --------------------------------------------------------------------------
# Tutorial corpus
# --------------------------------------------------------------------------


def _tutorial(name, domain, category, solver, files, allrun):
    return {
        "name": name,
        "domain": domain,
        "category": category,
        "solver": solver,
        "files": files,
        "allrun": allrun,
    }


def build_tutorials() -> list[dict]:
    """The eight reference cases every bundle retrieves from.

    Values here deliberately differ from what the scripted replies
    produce (grid sizes, inlet speeds) so tests can tell retrieved
    context from generated output.
    """
    box_u = vol_field(
        "U", "[0 1 -1 0 0 0 0]", "uniform (0 0 0)", CYCLIC_U_BCS, cls="volVectorField"
    )
    box_p = vol_field("p", "[0 2 -2 0 0 0 0]", "uniform 0", CYCLIC_U_BCS)
    boxturb = _tutorial(
        "boxTurb16",
        "incompressible",
        "DNS forced isotropic turbulence",
        "dnsFoam",
        [
            ("blockMeshDict", "system", block_mesh("16 16 16", CYCLIC_BOX)),
            (
                "boxTurbDict",
                "system",
                dictionary("boxTurbDict", "Ea              10;\n\nk0              5;\n"),
            ),
            ("controlDict", "system", control_dict("dnsFoam", "10", "0.05", "10")),
            ("fvSchemes", "system", fv_schemes()),
            ("fvSolution", "system", fv_solution()),
            ("transportProperties", "constant", transport_properties()),
            ("turbulenceProperties", "constant", turbulence_properties("laminar")),
            ("U", "0", box_u),
            ("p", "0", box_p),
        ],
        tutorial_allrun("boxTurb"),
    )

    pitz_u = vol_field(
        "U",
        "[0 1 -1 0 0 0 0]",
        "uniform (0 0 0)",
        "\n".join(
            [
                bc(
                    "inlet",
                    "type            fixedValue;",
                    "value           uniform (10 0 0);",
                ),
                bc("outlet", "type            zeroGradient;"),
                bc("upperWall", "type            noSlip;"),
                bc("lowerWall", "type            noSlip;"),
                bc("frontAndBack", "type            empty;"),
            ]
        ),
        cls="volVectorField",
    )
    pitz_p = vol_field(
        "p",
        "[0 2 -2 0 0 0 0]",
        "uniform 0",
        "\n".join(
            [
                bc("inlet", "type            zeroGradient;"),
                bc("outlet", "type            fixedValue;", "value           uniform 0;"),
                bc("upperWall", "type            zeroGradient;"),
                bc("lowerWall", "type            zeroGradient;"),
                bc("frontAndBack", "type            empty;"),
            ]
        ),
    )
    pitz = _tutorial(
        "pitzDaily",
        "incompressible",
        "LES",
        "pisoFoam",
        [
            ("blockMeshDict", "system", block_mesh("100 40 1", CHANNEL_BOUNDARY)),
            ("controlDict", "system", control_dict("pisoFoam", "0.1", "1e-05", "100")),
            ("fvSchemes", "system", fv_schemes("Gauss LUST grad(U)")),
            ("fvSolution", "system", fv_solution()),
            ("transportProperties", "constant", transport_properties()),
            (
                "turbulenceProperties",
                "constant",
                turbulence_properties(
                    "LES",
                    "LES\n{\n    model           kEqn;\n    turbulence      on;\n    printCoeffs     on;\n}",
                ),
            ),
            ("U", "0", pitz_u),
            ("p", "0", pitz_p),
        ],
        tutorial_allrun(),
    )

    cavity_k = vol_field(
        "k",
        "[0 2 -2 0 0 0 0]",
        "uniform 0.00325",
        "\n".join(
            [
                bc(
                    "movingWall",
                    "type            kqRWallFunction;",
                    "value           uniform 0.00325;",
                ),
                bc(
                    "fixedWalls",
                    "type            kqRWallFunction;",
                    "value           uniform 0.00325;",
                ),
                bc("frontAndBack", "type            empty;"),
            ]
        ),
    )
    cavity_eps = vol_field(
        "epsilon",
        "[0 2 -3 0 0 0 0]",
        "uniform 0.000765",
        "\n".join(
            [
                bc(
                    "movingWall",
                    "type            epsilonWallFunction;",
                    "value           uniform 0.000765;",
                ),
                bc(
                    "fixedWalls",
                    "type            epsilonWallFunction;",
                    "value           uniform 0.000765;",
                ),
                bc("frontAndBack", "type            empty;"),
            ]
        ),
    )
    cavity = _tutorial(
        "cavity",
        "incompressible",
        "RAS",
        "pisoFoam",
        [
            ("blockMeshDict", "system", block_mesh("20 20 1", CAVITY_BOUNDARY)),
            ("controlDict", "system", control_dict("pisoFoam", "10", "0.005", "100")),
            ("fvSchemes", "system", fv_schemes()),
            ("fvSolution", "system", fv_solution()),
            ("transportProperties", "constant", transport_properties()),
            (
                "turbulenceProperties",
                "constant",
                turbulence_properties(
                    "RAS",
                    "RAS\n{\n    model           kEpsilon;\n    turbulence      on;\n    printCoeffs     on;\n}",
                ),
            ),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (0 0 0)",
                    wall_and_empty("(1 0 0)"),
                    cls="volVectorField",
                ),
            ),
            (
                "p",
                "0",
                vol_field(
                    "p",
                    "[0 2 -2 0 0 0 0]",
                    "uniform 0",
                    "\n".join(
                        [
                            bc("movingWall", "type            zeroGradient;"),
                            bc("fixedWalls", "type            zeroGradient;"),
                            bc("frontAndBack", "type            empty;"),
                        ]
                    ),
                ),
            ),
            ("k", "0", cavity_k),
            ("epsilon", "0", cavity_eps),
        ],
        tutorial_allrun(),
    )

    lid = _tutorial(
        "lidDrivenCavity",
        "incompressible",
        "laminar lid driven cavity",
        "icoFoam",
        [
            ("blockMeshDict", "system", block_mesh("20 20 1", CAVITY_BOUNDARY)),
            ("controlDict", "system", control_dict("icoFoam", "0.5", "0.005", "20")),
            ("fvSchemes", "system", fv_schemes()),
            ("fvSolution", "system", fv_solution()),
            ("transportProperties", "constant", transport_properties()),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (0 0 0)",
                    wall_and_empty("(1 0 0)"),
                    cls="volVectorField",
                ),
            ),
            (
                "p",
                "0",
                vol_field(
                    "p",
                    "[0 2 -2 0 0 0 0]",
                    "uniform 0",
                    "\n".join(
                        [
                            bc("movingWall", "type            zeroGradient;"),
                            bc("fixedWalls", "type            zeroGradient;"),
                            bc("frontAndBack", "type            empty;"),
                        ]
                    ),
                ),
            ),
        ],
        tutorial_allrun(),
    )

    bend_t = vol_field(
        "T",
        "[0 0 0 1 0 0 0]",
        "uniform 300",
        "\n".join(
            [
                bc("inlet", "type            fixedValue;", "value           uniform 300;"),
                bc("outlet", "type            zeroGradient;"),
                bc("upperWall", "type            zeroGradient;"),
                bc("lowerWall", "type            zeroGradient;"),
                bc("frontAndBack", "type            zeroGradient;"),
            ]
        ),
    )
    bend = _tutorial(
        "squareBendLiq",
        "compressible",
        "RAS",
        "rhoSimpleFoam",
        [
            ("blockMeshDict", "system", block_mesh("30 10 10", CHANNEL_BOUNDARY)),
            ("controlDict", "system", control_dict("rhoSimpleFoam", "500", "1", "50")),
            ("fvSchemes", "system", fv_schemes("Gauss upwind")),
            ("fvSolution", "system", fv_solution(algo="SIMPLE")),
            ("thermophysicalProperties", "constant", thermo_properties()),
            (
                "turbulenceProperties",
                "constant",
                turbulence_properties(
                    "RAS",
                    "RAS\n{\n    model           kEpsilon;\n    turbulence      on;\n}",
                ),
            ),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (1 0 0)",
                    "\n".join(
                        [
                            bc(
                                "inlet",
                                "type            fixedValue;",
                                "value           uniform (1 0 0);",
                            ),
                            bc("outlet", "type            zeroGradient;"),
                            bc("upperWall", "type            noSlip;"),
                            bc("lowerWall", "type            noSlip;"),
                            bc("frontAndBack", "type            noSlip;"),
                        ]
                    ),
                    cls="volVectorField",
                ),
            ),
            (
                "p",
                "0",
                vol_field(
                    "p",
                    "[1 -1 -2 0 0 0 0]",
                    "uniform 100000",
                    "\n".join(
                        [
                            bc("inlet", "type            zeroGradient;"),
                            bc(
                                "outlet",
                                "type            fixedValue;",
                                "value           uniform 100000;",
                            ),
                            bc("upperWall", "type            zeroGradient;"),
                            bc("lowerWall", "type            zeroGradient;"),
                            bc("frontAndBack", "type            zeroGradient;"),
                        ]
                    ),
                ),
            ),
            ("T", "0", bend_t),
        ],
        tutorial_allrun(),
    )

    planar = _tutorial(
        "planarPoiseuille",
        "incompressible",
        "viscoelastic laminar",
        "pimpleFoam",
        [
            ("blockMeshDict", "system", block_mesh("1 40 1", CHANNEL_BOUNDARY)),
            ("controlDict", "system", control_dict("pimpleFoam", "20", "0.01", "200")),
            ("fvSchemes", "system", fv_schemes()),
            ("fvSolution", "system", fv_solution(algo="PIMPLE")),
            (
                "transportProperties",
                "constant",
                transport_properties("pressureGradient (1 0 0);"),
            ),
            (
                "turbulenceProperties",
                "constant",
                turbulence_properties(
                    "laminar",
                    "laminar\n{\n    model           Maxwell;\n    nuM             0.002;\n    lambda          4;\n}",
                ),
            ),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (0 0 0)",
                    "\n".join(
                        [
                            bc("inlet", "type            cyclic;"),
                            bc("outlet", "type            cyclic;"),
                            bc("upperWall", "type            noSlip;"),
                            bc("lowerWall", "type            noSlip;"),
                            bc("frontAndBack", "type            empty;"),
                        ]
                    ),
                    cls="volVectorField",
                ),
            ),
            (
                "p",
                "0",
                vol_field(
                    "p",
                    "[0 2 -2 0 0 0 0]",
                    "uniform 0",
                    "\n".join(
                        [
                            bc("inlet", "type            cyclic;"),
                            bc("outlet", "type            cyclic;"),
                            bc("upperWall", "type            zeroGradient;"),
                            bc("lowerWall", "type            zeroGradient;"),
                            bc("frontAndBack", "type            empty;"),
                        ]
                    ),
                ),
            ),
        ],
        tutorial_allrun(),
    )

    flame_t = vol_field(
        "T",
        "[0 0 0 1 0 0 0]",
        "uniform 2000",
        "\n".join(
            [
                bc("inlet", "type            fixedValue;", "value           uniform 300;"),
                bc("outlet", "type            zeroGradient;"),
                bc("upperWall", "type            zeroGradient;"),
                bc("lowerWall", "type            zeroGradient;"),
                bc("frontAndBack", "type            empty;"),
            ]
        ),
    )
    flame = _tutorial(
        "counterFlowFlame2D",
        "combustion",
        "laminar",
        "reactingFoam",
        [
            ("blockMeshDict", "system", block_mesh("25 10 1", CHANNEL_BOUNDARY)),
            ("controlDict", "system", control_dict("reactingFoam", "0.3", "1e-04", "100")),
            ("fvSchemes", "system", fv_schemes("Gauss limitedLinear 1")),
            ("fvSolution", "system", fv_solution(algo="PIMPLE")),
            ("thermophysicalProperties", "constant", thermo_properties()),
            (
                "combustionProperties",
                "constant",
                dictionary(
                    "combustionProperties",
                    "combustionModel  infinitelyFastChemistry;\n\ninfinitelyFastChemistryCoeffs\n{\n    semiImplicit    no;\n    C               5.0;\n}\n",
                ),
            ),
            (
                "turbulenceProperties",
                "constant",
                turbulence_properties("laminar"),
            ),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (0 0 0)",
                    "\n".join(
                        [
                            bc(
                                "inlet",
                                "type            fixedValue;",
                                "value           uniform (0.1 0 0);",
                            ),
                            bc("outlet", "type            zeroGradient;"),
                            bc("upperWall", "type            zeroGradient;"),
                            bc("lowerWall", "type            zeroGradient;"),
                            bc("frontAndBack", "type            empty;"),
                        ]
                    ),
                    cls="volVectorField",
                ),
            ),
            ("T", "0", flame_t),
            (
                "p",
                "0",
                vol_field(
                    "p",
                    "[1 -1 -2 0 0 0 0]",
                    "uniform 100000",
                    "\n".join(
                        [
                            bc("inlet", "type            zeroGradient;"),
                            bc("outlet", "type            fixedValue;", "value           uniform 100000;"),
                            bc("upperWall", "type            zeroGradient;"),
                            bc("lowerWall", "type            zeroGradient;"),
                            bc("frontAndBack", "type            empty;"),
                        ]
                    ),
                ),
            ),
        ],
        tutorial_allrun(),
    )

    hot_cold = "\n".join(
        [
            bc("hot", "type            fixedValue;", "value           uniform 307.75;"),
            bc("cold", "type            fixedValue;", "value           uniform 288.15;"),
            bc("floor", "type            zeroGradient;"),
            bc("ceiling", "type            zeroGradient;"),
            bc("frontAndBack", "type            zeroGradient;"),
        ]
    )
    buoyant = _tutorial(
        "buoyantCavity",
        "heatTransfer",
        "RAS natural convection heat transfer",
        "buoyantFoam",
        [
            ("blockMeshDict", "system", block_mesh("35 35 1", HEATED_BOUNDARY)),
            ("controlDict", "system", control_dict("buoyantFoam", "2", "0.001", "100")),
            ("fvSchemes", "system", fv_schemes("Gauss upwind")),
            ("fvSolution", "system", fv_solution(pressure="p_rgh", algo="PIMPLE")),
            ("thermophysicalProperties", "constant", thermo_properties()),
            (
                "turbulenceProperties",
                "constant",
                turbulence_properties(
                    "RAS",
                    "RAS\n{\n    model           kOmegaSST;\n    turbulence      on;\n}",
                ),
            ),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (0 0 0)",
                    "\n".join(
                        [
                            bc("hot", "type            noSlip;"),
                            bc("cold", "type            noSlip;"),
                            bc("floor", "type            noSlip;"),
                            bc("ceiling", "type            noSlip;"),
                            bc("frontAndBack", "type            noSlip;"),
                        ]
                    ),
                    cls="volVectorField",
                ),
            ),
            (
                "p_rgh",
                "0",
                vol_field(
                    "p_rgh",
                    "[1 -1 -2 0 0 0 0]",
                    "uniform 100000",
                    "\n".join(
                        [
                            bc("hot", "type            fixedFluxPressure;"),
                            bc("cold", "type            fixedFluxPressure;"),
                            bc("floor", "type            fixedFluxPressure;"),
                            bc("ceiling", "type            fixedFluxPressure;"),
                            bc("frontAndBack", "type            fixedFluxPressure;"),
                        ]
                    ),
                ),
            ),
            ("T", "0", vol_field("T", "[0 0 0 1 0 0 0]", "uniform 293", hot_cold)),
        ],
        tutorial_allrun(),
    )

    return [boxturb, pitz, cavity, lid, bend, planar, flame, buoyant]


def write_corpus(tutorials: list[dict]) -> None:
    arch_chunks = []
    ctx_chunks = []
    allrun_chunks = []
    for tut in tutorials:
        meta = (tut["name"], tut["domain"], tut["category"], tut["solver"])
        arch_chunks.append(
            make_architecture_chunk(*meta, [(n, f) for n, f, _ in tut["files"]])
        )
        for fname, _folder, body in tut["files"]:
            ctx_chunks.append(
                make_file_chunk(ChunkKind.FILE_CONTEXT, *meta, body, file_name=fname)
            )
        allrun_chunks.append(make_file_chunk(ChunkKind.ALLRUN, *meta, tut["allrun"]))

    CORPUS_DIR.mkdir(parents=True, exist_ok=True)
    (CORPUS_DIR / "architecture.txt").write_text(
        serialize_chunks(arch_chunks), encoding="utf-8"
    )
    (CORPUS_DIR / "file_contexts.txt").write_text(
        serialize_chunks(ctx_chunks), encoding="utf-8"
    )
    (CORPUS_DIR / "allruns.txt").write_text(
        serialize_chunks(allrun_chunks), encoding="utf-8"
    )


# --------------------------------------------------------------------------
# Bundle assembly
# --------------------------------------------------------------------------


# Category lines for the scripted find replies.  Three tutorials need
# extra discriminating tokens or the hashed-bag embedding ranks a
# neighbour first (cavity vs buoyantCavity, planar vs lidDrivenCavity).
_REPLY_CATEGORY = {
    "cavity": "RAS k epsilon turbulence",
    "planarPoiseuille": "viscoelastic laminar planar Poiseuille flow",
    "pitzDaily": "LES of the pitzDaily backward facing step",
}


def find_reply_for(tut: dict) -> str:
    category = _REPLY_CATEGORY.get(tut["name"], tut["category"])
    return (
        f"case name: {tut['name']}\n"
        f"case domain: {tut['domain']}\n"
        f"case category: {category}\n"
        f"case solver: {tut['solver']}"
    )


def arch_reply(files: list[tuple[str, str, str]], requirement: str) -> str:
    lines = [f"splits into {len(files)} subtasks:"]
    for i, (fname, folder, _body) in enumerate(files, start=1):
        lines.append(f"subtask{i}: {subtask_echo(fname, folder, requirement)}")
    return fence("\n".join(lines))


def build_script(b: dict) -> list[dict]:
    cfg = b.get("config") or {}
    requirement = b["requirement"]
    entries: list[dict] = []
    if cfg.get("enable_rag", True):
        entries.append(
            {
                "match": "standardized OpenFOAM case description",
                "reply": b["find_reply"],
            }
        )
    entries.append(
        {
            "match": "generate the OpenFOAM input foamfiles list",
            "reply": arch_reply(b["files"], requirement),
        }
    )
    for fname, folder, body in b["files"]:
        entries.append(
            {
                "match": f"to Write a OpenFoam {fname} foamfile in {folder} folder",
                "reply": fence(body),
            }
        )
    entries.append(
        {"match": "linux execution command allrun file", "reply": fence(b["allrun"])}
    )
    for cycle in b.get("reviews", ()):
        entries.append(
            {
                "match": cycle["match"],
                "reply": serialize_review_targets(cycle["targets"]),
            }
        )
        if "revision" in cycle:
            rev = cycle["revision"]
            entries.append(
                {
                    "match": "Revise the architecture",
                    "reply": arch_reply(rev["files"], requirement),
                }
            )
            for fname, folder, body in rev["new"]:
                entries.append(
                    {
                        "match": f"to Write a OpenFoam {fname} foamfile in {folder} folder",
                        "reply": fence(body),
                    }
                )
        else:
            for fname, content in cycle["rewrites"]:
                entries.append(
                    {
                        "match": f"rewrite a OpenFoam {fname} foamfile",
                        "reply": fence(content),
                    }
                )
    if "usage" in b:
        for entry in entries:
            entry["usage"] = dict(b["usage"])
    if b.get("declare_usage"):
        # varied but deterministic per-call numbers, so replay tests can
        # compare the ledger against the script's declared sum
        for i, entry in enumerate(entries):
            entry["usage"] = {
                "prompt_tokens": 600 + i * 37,
                "completion_tokens": 90 + i * 23,
            }
    return entries


def rule(command, exit_code=0, stdout="", stderr="", reaches_end=False, diverges=False, times=None):
    out: dict = {"command": command, "exit_code": exit_code}
    if stdout:
        out["stdout"] = stdout
    if stderr:
        out["stderr"] = stderr
    if reaches_end or diverges:
        out["advance"] = {}
        if reaches_end:
            out["advance"]["reaches_end_time"] = True
        if diverges:
            out["advance"]["diverges"] = True
    if times is not None:
        out["times"] = times
    return out


BLOCKMESH_OK = rule("blockMesh", stdout="Creating block mesh topology\nMesh OK.\n")


# --------------------------------------------------------------------------
# Dataset case families
# --------------------------------------------------------------------------


def hit_bundle(tut: dict, requirement: str, checks: list, cells: str) -> dict:
    broken_mesh = block_mesh(cells, CYCLIC_BOX_BROKEN)
    fixed_mesh = block_mesh(cells, CYCLIC_BOX)
    broken_u = vol_field(
        "U", "[0 1 -1 0 0 0 0]", "uniform (0 0 0)", CYCLIC_U_BCS_BROKEN, cls="volVectorField"
    )
    fixed_u = vol_field(
        "U", "[0 1 -1 0 0 0 0]", "uniform (0 0 0)", CYCLIC_U_BCS, cls="volVectorField"
    )
    files = [
        ("blockMeshDict", "system", broken_mesh),
        (
            "boxTurbDict",
            "system",
            dictionary("boxTurbDict", "Ea              10;\n\nk0              5;\n"),
        ),
        ("controlDict", "system", control_dict("dnsFoam", "10", "0.05", "10")),
        ("fvSchemes", "system", fv_schemes()),
        ("fvSolution", "system", fv_solution()),
        ("transportProperties", "constant", transport_properties()),
        ("turbulenceProperties", "constant", turbulence_properties("laminar")),
        ("U", "0", broken_u),
        ("p", "0", vol_field("p", "[0 2 -2 0 0 0 0]", "uniform 0", CYCLIC_U_BCS)),
    ]
    scenario = [
        rule(
            "blockMesh",
            exit_code=1,
            stderr="--> FOAM FATAL ERROR:\nNo 'neighbourPatch' provided for cyclic patch left\n",
            times=1,
        ),
        BLOCKMESH_OK,
        rule("boxTurb", stdout="Generating initial turbulence field\n"),
        rule(
            "dnsFoam",
            exit_code=1,
            stderr="--> FOAM FATAL IO ERROR:\ncannot find patchField entry for cyclic left\n",
            times=1,
        ),
        rule("dnsFoam", reaches_end=True),
    ]
    reviews = [
        {
            "match": "neighbourPatch",
            "targets": [("blockMeshDict", "system")],
            "rewrites": [("blockMeshDict", fixed_mesh)],
        },
        {
            "match": "patchField entry for cyclic",
            "targets": [("U", "0")],
            "rewrites": [("U", fixed_u)],
        },
    ]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "boxTurb", "dnsFoam"),
        "scenario": scenario,
        "reviews": reviews,
        "declare_usage": True,
        "design": {"score": 4, "iterations": 2, "stop_reason": "completed"},
    }


def pitz_bundle(tut: dict, requirement: str, checks: list, inlet: str) -> dict:
    inlet_bcs = "\n".join(
        [
            bc(
                "inlet",
                "type            fixedValue;",
                f"value           uniform {inlet};",
            ),
            bc("outlet", "type            zeroGradient;"),
            bc("upperWall", "type            noSlip;"),
            bc("lowerWall", "type            noSlip;"),
            bc("frontAndBack", "type            empty;"),
        ]
    )
    files = [
        ("blockMeshDict", "system", block_mesh("100 40 1", CHANNEL_BOUNDARY)),
        ("controlDict", "system", control_dict("pisoFoam", "0.1", "1e-05", "100")),
        ("fvSchemes", "system", fv_schemes("Gauss LUST grad(U)")),
        ("fvSolution", "system", fv_solution(tolerance="1e-02")),
        ("transportProperties", "constant", transport_properties()),
        (
            "turbulenceProperties",
            "constant",
            turbulence_properties(
                "LES",
                "LES\n{\n    model           kEqn;\n    turbulence      on;\n}",
            ),
        ),
        (
            "U",
            "0",
            vol_field(
                "U", "[0 1 -1 0 0 0 0]", "uniform (0 0 0)", inlet_bcs, cls="volVectorField"
            ),
        ),
        (
            "p",
            "0",
            vol_field(
                "p",
                "[0 2 -2 0 0 0 0]",
                "uniform 0",
                "\n".join(
                    [
                        bc("inlet", "type            zeroGradient;"),
                        bc("outlet", "type            fixedValue;", "value           uniform 0;"),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
    ]
    scenario = [
        BLOCKMESH_OK,
        rule(
            "pisoFoam",
            exit_code=1,
            stderr="Floating point exception (core dumped)\n",
            diverges=True,
            times=1,
        ),
        rule("pisoFoam", reaches_end=True),
    ]
    reviews = [
        {
            "match": "Floating point exception",
            "targets": [("fvSolution", "system")],
            "rewrites": [("fvSolution", fv_solution())],
        }
    ]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "pisoFoam"),
        "scenario": scenario,
        "reviews": reviews,
        "design": {"score": 4, "iterations": 1, "stop_reason": "completed"},
    }


def cavity_bundle(tut: dict, requirement: str, checks: list, ras_model: str) -> dict:
    files = [
        ("blockMeshDict", "system", block_mesh("15 15 1", CAVITY_BOUNDARY)),
        ("controlDict", "system", control_dict("pisoFoam", "10", "0.005", "100")),
        ("fvSchemes", "system", fv_schemes()),
        ("fvSolution", "system", fv_solution()),
        ("transportProperties", "constant", transport_properties()),
        (
            "turbulenceProperties",
            "constant",
            turbulence_properties(
                "RAS",
                f"RAS\n{{\n    model           {ras_model};\n    turbulence      on;\n    printCoeffs     on;\n}}",
            ),
        ),
        (
            "U",
            "0",
            vol_field(
                "U",
                "[0 1 -1 0 0 0 0]",
                "uniform (0 0 0)",
                wall_and_empty("(1 0 0)"),
                cls="volVectorField",
            ),
        ),
        (
            "p",
            "0",
            vol_field(
                "p",
                "[0 2 -2 0 0 0 0]",
                "uniform 0",
                "\n".join(
                    [
                        bc("movingWall", "type            zeroGradient;"),
                        bc("fixedWalls", "type            zeroGradient;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
        (
            "k",
            "0",
            vol_field(
                "k",
                "[0 2 -2 0 0 0 0]",
                "uniform 0.00325",
                "\n".join(
                    [
                        bc(
                            "movingWall",
                            "type            kqRWallFunction;",
                            "value           uniform 0.00325;",
                        ),
                        bc(
                            "fixedWalls",
                            "type            kqRWallFunction;",
                            "value           uniform 0.00325;",
                        ),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
        (
            "epsilon",
            "0",
            vol_field(
                "epsilon",
                "[0 2 -3 0 0 0 0]",
                "uniform 0.000765",
                "\n".join(
                    [
                        bc(
                            "movingWall",
                            "type            epsilonWallFunction;",
                            "value           uniform 0.000765;",
                        ),
                        bc(
                            "fixedWalls",
                            "type            epsilonWallFunction;",
                            "value           uniform 0.000765;",
                        ),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
    ]
    scenario = [BLOCKMESH_OK, rule("pisoFoam", reaches_end=True)]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "pisoFoam"),
        "scenario": scenario,
        "reviews": [],
        "design": {"score": 4, "iterations": 0, "stop_reason": "completed"},
    }


def lid_bundle(tut: dict, requirement: str, checks: list, lid_speed: str) -> dict:
    lid_p = vol_field(
        "p",
        "[0 2 -2 0 0 0 0]",
        "uniform 0",
        "\n".join(
            [
                bc("movingWall", "type            zeroGradient;"),
                bc("fixedWalls", "type            zeroGradient;"),
                bc("frontAndBack", "type            empty;"),
            ]
        ),
    )
    files = [
        ("blockMeshDict", "system", block_mesh("20 20 1", CAVITY_BOUNDARY)),
        ("controlDict", "system", control_dict("icoFoam", "0.5", "0.005", "20")),
        ("fvSchemes", "system", fv_schemes()),
        ("fvSolution", "system", fv_solution()),
        ("transportProperties", "constant", transport_properties()),
        (
            "U",
            "0",
            vol_field(
                "U",
                "[0 1 -1 0 0 0 0]",
                "uniform (0 0 0)",
                wall_and_empty(lid_speed),
                cls="volVectorField",
            ),
        ),
    ]
    scenario = [
        BLOCKMESH_OK,
        rule(
            "icoFoam",
            exit_code=1,
            stderr='--> FOAM FATAL ERROR:\ncannot find file "0/p"\n',
            times=1,
        ),
        rule("icoFoam", reaches_end=True),
    ]
    reviews = [
        {
            "match": 'cannot find file "0/p"',
            "targets": [("p", "0")],
            "revision": {"files": files + [("p", "0", lid_p)], "new": [("p", "0", lid_p)]},
        }
    ]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "icoFoam"),
        "scenario": scenario,
        "reviews": reviews,
        "design": {"score": 4, "iterations": 1, "stop_reason": "completed"},
    }


def bend_bundle(
    tut: dict, requirement: str, checks: list, end_time: str, delta_t: str, write_interval: str
) -> dict:
    files = [
        ("blockMeshDict", "system", block_mesh("30 10 10", CHANNEL_BOUNDARY)),
        ("controlDict", "system", control_dict("rhoSimpleFoam", end_time, delta_t, write_interval)),
        ("fvSchemes", "system", fv_schemes("Gauss upwind")),
        ("fvSolution", "system", fv_solution(algo="SIMPLE")),
        ("thermophysicalProperties", "constant", thermo_properties()),
        (
            "turbulenceProperties",
            "constant",
            turbulence_properties(
                "RAS", "RAS\n{\n    model           kEpsilon;\n    turbulence      on;\n}"
            ),
        ),
        (
            "U",
            "0",
            vol_field(
                "U",
                "[0 1 -1 0 0 0 0]",
                "uniform (1 0 0)",
                "\n".join(
                    [
                        bc(
                            "inlet",
                            "type            fixedValue;",
                            "value           uniform (1 0 0);",
                        ),
                        bc("outlet", "type            zeroGradient;"),
                        bc("upperWall", "type            noSlip;"),
                        bc("lowerWall", "type            noSlip;"),
                        bc("frontAndBack", "type            noSlip;"),
                    ]
                ),
                cls="volVectorField",
            ),
        ),
        (
            "p",
            "0",
            vol_field(
                "p",
                "[1 -1 -2 0 0 0 0]",
                "uniform 100000",
                "\n".join(
                    [
                        bc("inlet", "type            zeroGradient;"),
                        bc(
                            "outlet",
                            "type            fixedValue;",
                            "value           uniform 100000;",
                        ),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            zeroGradient;"),
                    ]
                ),
            ),
        ),
        (
            "T",
            "0",
            vol_field(
                "T",
                "[0 0 0 1 0 0 0]",
                "uniform 300",
                "\n".join(
                    [
                        bc("inlet", "type            fixedValue;", "value           uniform 300;"),
                        bc("outlet", "type            zeroGradient;"),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            zeroGradient;"),
                    ]
                ),
            ),
        ),
    ]
    scenario = [BLOCKMESH_OK, rule("rhoSimpleFoam", reaches_end=True)]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "rhoSimpleFoam"),
        "scenario": scenario,
        "reviews": [],
        "design": {"score": 4, "iterations": 0, "stop_reason": "completed"},
    }


def planar_bundle(tut: dict, requirement: str, checks: list, newtonian: bool) -> dict:
    if newtonian:
        turb = turbulence_properties("laminar")
    else:
        turb = turbulence_properties(
            "laminar",
            "laminar\n{\n    model           Maxwell;\n    nuM             0.002;\n    lambda          4;\n}",
        )
    short_control = control_dict("pimpleFoam", "1", "0.01", "200")
    full_control = control_dict("pimpleFoam", "20", "0.01", "200")
    files = [
        ("blockMeshDict", "system", block_mesh("1 20 1", CHANNEL_BOUNDARY)),
        ("controlDict", "system", short_control),
        ("fvSchemes", "system", fv_schemes()),
        ("fvSolution", "system", fv_solution(algo="PIMPLE")),
        (
            "transportProperties",
            "constant",
            transport_properties("pressureGradient (1 0 0);"),
        ),
        ("turbulenceProperties", "constant", turb),
        (
            "U",
            "0",
            vol_field(
                "U",
                "[0 1 -1 0 0 0 0]",
                "uniform (0 0 0)",
                "\n".join(
                    [
                        bc("inlet", "type            cyclic;"),
                        bc("outlet", "type            cyclic;"),
                        bc("upperWall", "type            noSlip;"),
                        bc("lowerWall", "type            noSlip;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
                cls="volVectorField",
            ),
        ),
        (
            "p",
            "0",
            vol_field(
                "p",
                "[0 2 -2 0 0 0 0]",
                "uniform 0",
                "\n".join(
                    [
                        bc("inlet", "type            cyclic;"),
                        bc("outlet", "type            cyclic;"),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
    ]
    scenario = [
        BLOCKMESH_OK,
        rule(
            "pimpleFoam",
            stdout="Starting time loop\n\nTime = 1\n\nstopped early: wall clock limit reached\n",
            times=1,
        ),
        rule("pimpleFoam", reaches_end=True),
    ]
    reviews = [
        {
            "match": "stopped early",
            "targets": [("controlDict", "system")],
            "rewrites": [("controlDict", full_control)],
        }
    ]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "pimpleFoam"),
        "scenario": scenario,
        "reviews": reviews,
        "design": {"score": 4, "iterations": 1, "stop_reason": "completed"},
    }


def flame_bundle(tut: dict, requirement: str, checks: list, cells: str) -> dict:
    files = [
        ("blockMeshDict", "system", block_mesh(cells, CHANNEL_BOUNDARY)),
        ("controlDict", "system", control_dict("reactingFoam", "0.3", "1e-04", "100")),
        ("fvSchemes", "system", fv_schemes("Gauss limitedLinear 1")),
        ("fvSolution", "system", fv_solution(tolerance="1e-01", algo="PIMPLE")),
        ("thermophysicalProperties", "constant", thermo_properties()),
        (
            "combustionProperties",
            "constant",
            dictionary(
                "combustionProperties",
                "combustionModel  infinitelyFastChemistry;\n\ninfinitelyFastChemistryCoeffs\n{\n    semiImplicit    no;\n    C               5.0;\n}\n",
            ),
        ),
        ("turbulenceProperties", "constant", turbulence_properties("laminar")),
        (
            "U",
            "0",
            vol_field(
                "U",
                "[0 1 -1 0 0 0 0]",
                "uniform (0 0 0)",
                "\n".join(
                    [
                        bc(
                            "inlet",
                            "type            fixedValue;",
                            "value           uniform (0.1 0 0);",
                        ),
                        bc("outlet", "type            zeroGradient;"),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
                cls="volVectorField",
            ),
        ),
        (
            "T",
            "0",
            vol_field(
                "T",
                "[0 0 0 1 0 0 0]",
                "uniform 2000",
                "\n".join(
                    [
                        bc("inlet", "type            fixedValue;", "value           uniform 300;"),
                        bc("outlet", "type            zeroGradient;"),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
        (
            "p",
            "0",
            vol_field(
                "p",
                "[1 -1 -2 0 0 0 0]",
                "uniform 100000",
                "\n".join(
                    [
                        bc("inlet", "type            zeroGradient;"),
                        bc(
                            "outlet",
                            "type            fixedValue;",
                            "value           uniform 100000;",
                        ),
                        bc("upperWall", "type            zeroGradient;"),
                        bc("lowerWall", "type            zeroGradient;"),
                        bc("frontAndBack", "type            empty;"),
                    ]
                ),
            ),
        ),
    ]
    scenario = [
        BLOCKMESH_OK,
        rule("reactingFoam", diverges=True, times=1),
        rule("reactingFoam", reaches_end=True),
    ]
    reviews = [
        {
            "match": "Floating point exception",
            "targets": [("fvSolution", "system")],
            "rewrites": [("fvSolution", fv_solution(algo="PIMPLE"))],
        }
    ]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "reactingFoam"),
        "scenario": scenario,
        "reviews": reviews,
        "design": {"score": 4, "iterations": 1, "stop_reason": "completed"},
    }


def buoyant_bundle(tut: dict, requirement: str, checks: list, t_hot: str, t_cold: str) -> dict:
    def temp_field(with_front: bool) -> str:
        bcs = [
            bc("hot", "type            fixedValue;", f"value           uniform {t_hot};"),
            bc("cold", "type            fixedValue;", f"value           uniform {t_cold};"),
            bc("floor", "type            zeroGradient;"),
            bc("ceiling", "type            zeroGradient;"),
        ]
        if with_front:
            bcs.append(bc("frontAndBack", "type            zeroGradient;"))
        return vol_field("T", "[0 0 0 1 0 0 0]", "uniform 293", "\n".join(bcs))

    files = [
        ("blockMeshDict", "system", block_mesh("35 35 1", HEATED_BOUNDARY)),
        ("controlDict", "system", control_dict("buoyantFoam", "2", "0.001", "100")),
        ("fvSchemes", "system", fv_schemes("Gauss upwind")),
        ("fvSolution", "system", fv_solution(pressure="p_rgh", algo="PIMPLE")),
        ("thermophysicalProperties", "constant", thermo_properties()),
        (
            "turbulenceProperties",
            "constant",
            turbulence_properties(
                "RAS", "RAS\n{\n    model           kOmegaSST;\n    turbulence      on;\n}"
            ),
        ),
        (
            "U",
            "0",
            vol_field(
                "U",
                "[0 1 -1 0 0 0 0]",
                "uniform (0 0 0)",
                "\n".join(
                    [
                        bc("hot", "type            noSlip;"),
                        bc("cold", "type            noSlip;"),
                        bc("floor", "type            noSlip;"),
                        bc("ceiling", "type            noSlip;"),
                        bc("frontAndBack", "type            noSlip;"),
                    ]
                ),
                cls="volVectorField",
            ),
        ),
        (
            "p_rgh",
            "0",
            vol_field(
                "p_rgh",
                "[1 -1 -2 0 0 0 0]",
                "uniform 100000",
                "\n".join(
                    [
                        bc("hot", "type            fixedFluxPressure;"),
                        bc("cold", "type            fixedFluxPressure;"),
                        bc("floor", "type            fixedFluxPressure;"),
                        bc("ceiling", "type            fixedFluxPressure;"),
                        bc("frontAndBack", "type            fixedFluxPressure;"),
                    ]
                ),
            ),
        ),
        ("T", "0", temp_field(with_front=False)),
    ]
    scenario = [
        BLOCKMESH_OK,
        rule(
            "buoyantFoam",
            exit_code=1,
            stderr="--> FOAM FATAL IO ERROR:\nCannot find patchField entry for frontAndBack\n",
            times=1,
        ),
        rule("buoyantFoam", reaches_end=True),
    ]
    reviews = [
        {
            "match": "frontAndBack",
            "targets": [("T", "0")],
            "rewrites": [("T", temp_field(with_front=True))],
        }
    ]
    return {
        "requirement": requirement,
        "checks": checks,
        "tutorial": tut,
        "find_reply": find_reply_for(tut),
        "files": files,
        "allrun": gen_allrun("blockMesh", "buoyantFoam"),
        "scenario": scenario,
        "reviews": reviews,
        "design": {"score": 4, "iterations": 1, "stop_reason": "completed"},
    }


# --------------------------------------------------------------------------
# Ablation bundles
# --------------------------------------------------------------------------


def ablation_bundles(tutorials: dict) -> dict[str, dict]:
    cavity_tut = tutorials["cavity"]
    box_tut = tutorials["boxTurb16"]
    lid_tut = tutorials["lidDrivenCavity"]

    small_files = [
        ("controlDict", "system", control_dict("pisoFoam", "10", "0.005", "100")),
        ("fvSolution", "system", fv_solution()),
    ]

    no_rag = {
        "requirement": "run any incompressible solver on a unit box",
        "checks": [],
        "tutorial": None,
        "find_reply": None,
        "files": [
            ("blockMeshDict", "system", block_mesh("10 10 10", CAVITY_BOUNDARY)),
            ("controlDict", "system", control_dict("icoFoam", "1", "0.01", "20")),
            (
                "U",
                "0",
                vol_field(
                    "U",
                    "[0 1 -1 0 0 0 0]",
                    "uniform (0 0 0)",
                    wall_and_empty(),
                    cls="volVectorField",
                ),
            ),
        ],
        "allrun": gen_allrun("blockMesh", "icoFoam"),
        "scenario": [
            rule(
                "blockMesh",
                exit_code=1,
                stderr="--> FOAM FATAL ERROR:\nface 4 in patch 0 does not have neighbour cell\n",
            )
        ],
        "reviews": [],
        "config": {"enable_rag": False, "enable_reviewer": False},
        "design": {"score": 0, "iterations": 0, "stop_reason": "reviewer-disabled"},
    }

    hit_like = hit_bundle(
        box_tut,
        "do a DNS simulation of incompressible forcing homogeneous isotropic turbulence with Grid 32^3 using dnsFoam",
        [],
        "32 32 32",
    )
    no_reviewer = {
        "requirement": hit_like["requirement"],
        "checks": [],
        "tutorial": box_tut,
        "find_reply": hit_like["find_reply"],
        "files": hit_like["files"],
        "allrun": hit_like["allrun"],
        "scenario": [
            rule(
                "blockMesh",
                exit_code=1,
                stderr="--> FOAM FATAL ERROR:\nNo 'neighbourPatch' provided for cyclic patch left\n",
            )
        ],
        "reviews": [],
        "config": {"enable_reviewer": False},
        "design": {"score": 0, "iterations": 0, "stop_reason": "reviewer-disabled"},
    }

    lid_like = lid_bundle(
        lid_tut,
        "do an incompressible lid driven cavity flow simulation with the top wall moves in the x direction at a speed of 1 m/s while the other three are stationary",
        [],
        "(1 0 0)",
    )
    broken_control = control_dict("icoFoam", "0.5", "0.005", "20").replace(
        "endTime         0.5;\n", ""
    )
    no_review_arch = {
        "requirement": lid_like["requirement"],
        "checks": [],
        "tutorial": lid_tut,
        "find_reply": lid_like["find_reply"],
        "files": [
            (n, f, broken_control if n == "controlDict" else body)
            for n, f, body in lid_like["files"]
        ],
        "allrun": lid_like["allrun"],
        "scenario": [
            BLOCKMESH_OK,
            rule(
                "icoFoam",
                exit_code=1,
                stderr='--> FOAM FATAL IO ERROR:\nkeyword endTime is undefined in dictionary "system/controlDict"\n',
                times=1,
            ),
            rule("icoFoam", reaches_end=True),
        ],
        "reviews": [
            {
                "match": "endTime is undefined",
                "targets": [("p", "0"), ("controlDict", "system")],
                "rewrites": [("controlDict", control_dict("icoFoam", "0.5", "0.005", "20"))],
            }
        ],
        "config": {"enable_review_architecture": False},
        "design": {"score": 3, "iterations": 1, "stop_reason": "completed"},
    }

    cap = {
        "requirement": "keep an unstable cavity run alive no matter what",
        "checks": [],
        "tutorial": cavity_tut,
        "find_reply": find_reply_for(cavity_tut),
        "files": small_files,
        "allrun": gen_allrun("pisoFoam"),
        "scenario": [rule("pisoFoam", diverges=True)],
        "reviews": [
            {
                "match": "Floating point exception",
                "targets": [("fvSolution", "system")],
                "rewrites": [("fvSolution", fv_solution())],
            }
        ]
        * 20,
        "config": {},
        "design": {"score": 2, "iterations": 20, "stop_reason": "iteration-cap"},
    }

    token_budget = {
        "requirement": "mesh a cavity with a deliberately tiny token budget",
        "checks": [],
        "tutorial": cavity_tut,
        "find_reply": find_reply_for(cavity_tut),
        "files": small_files,
        "allrun": gen_allrun("blockMesh", "pisoFoam"),
        "scenario": [
            rule(
                "blockMesh",
                exit_code=1,
                stderr="--> FOAM FATAL ERROR:\ninconsistent block specification\n",
            )
        ],
        "reviews": [],
        "config": {"token_budget": 2000},
        "usage": {"prompt_tokens": 1000, "completion_tokens": 100},
        "design": {"score": 0, "iterations": 0, "stop_reason": "token-budget"},
    }

    parse_failure = {
        "requirement": "produce a cavity case from an uncooperative model",
        "checks": [],
        "tutorial": cavity_tut,
        "find_reply": find_reply_for(cavity_tut),
        "files": [],
        "allrun": "",
        "scenario": [rule("", exit_code=0)],
        "reviews": [],
        "config": {},
        "script_override": [
            {
                "match": "standardized OpenFOAM case description",
                "reply": find_reply_for(cavity_tut),
            },
            {
                "match": "generate the OpenFOAM input foamfiles list",
                "reply": "I cannot split this into subtasks, sorry.",
            },
            {
                "match": "Reply again in exactly the required format",
                "reply": "Still refusing to produce a subtask list.",
            },
        ],
        "design": {"score": 0, "iterations": 0, "stop_reason": "parse-failure"},
    }

    return {
        "ablation_no_rag": no_rag,
        "ablation_no_reviewer": no_reviewer,
        "ablation_no_review_arch": no_review_arch,
        "ablation_cap": cap,
        "ablation_token_budget": token_budget,
        "ablation_parse_failure": parse_failure,
    }


# --------------------------------------------------------------------------
# Assembly, measurement, validation
# --------------------------------------------------------------------------


def dataset_bundles(tutorials: dict) -> dict[str, dict]:
    """One bundle per manifest case, parameterized by the manifest itself."""
    reqs = {}
    for manifest_name in ("dataset1.json", "dataset2.json"):
        data = json.loads((MANIFESTS / manifest_name).read_text(encoding="utf-8"))
        for case in data["cases"]:
            reqs[case["fixture"]] = (case["requirement"], case["checks"])

    def r(fixture):
        return reqs[fixture]

    bundles = {}
    bundles["hit"] = hit_bundle(tutorials["boxTurb16"], *r("hit"), cells="32 32 32")
    bundles["hit_d2"] = hit_bundle(tutorials["boxTurb16"], *r("hit_d2"), cells="20 20 20")
    bundles["pitz_daily"] = pitz_bundle(
        tutorials["pitzDaily"], *r("pitz_daily"), inlet="(5 0 0)"
    )
    bundles["pitz_daily_d2"] = pitz_bundle(
        tutorials["pitzDaily"], *r("pitz_daily_d2"), inlet="(8 0 0)"
    )
    bundles["cavity"] = cavity_bundle(tutorials["cavity"], *r("cavity"), ras_model="RNGkEpsilon")
    bundles["cavity_d2"] = cavity_bundle(
        tutorials["cavity"], *r("cavity_d2"), ras_model="kEpsilon"
    )
    bundles["lid_driven_cavity"] = lid_bundle(
        tutorials["lidDrivenCavity"], *r("lid_driven_cavity"), lid_speed="(1 0 0)"
    )
    bundles["lid_driven_cavity_d2"] = lid_bundle(
        tutorials["lidDrivenCavity"], *r("lid_driven_cavity_d2"), lid_speed="(2 0 0)"
    )
    bundles["square_bend_liq"] = bend_bundle(
        tutorials["squareBendLiq"], *r("square_bend_liq"), end_time="100", delta_t="1", write_interval="10"
    )
    bundles["square_bend_liq_d2"] = bend_bundle(
        tutorials["squareBendLiq"],
        *r("square_bend_liq_d2"),
        end_time="1000",
        delta_t="1",
        write_interval="100",
    )
    bundles["planar_poiseuille"] = planar_bundle(
        tutorials["planarPoiseuille"], *r("planar_poiseuille"), newtonian=False
    )
    bundles["planar_poiseuille_d2"] = planar_bundle(
        tutorials["planarPoiseuille"], *r("planar_poiseuille_d2"), newtonian=True
    )
    bundles["counter_flow_flame"] = flame_bundle(
        tutorials["counterFlowFlame2D"], *r("counter_flow_flame"), cells="50 20 1"
    )
    bundles["counter_flow_flame_d2"] = flame_bundle(
        tutorials["counterFlowFlame2D"], *r("counter_flow_flame_d2"), cells="40 20 1"
    )
    bundles["buoyant_cavity"] = buoyant_bundle(
        tutorials["buoyantCavity"], *r("buoyant_cavity"), t_hot="303", t_cold="283"
    )
    bundles["buoyant_cavity_d2"] = buoyant_bundle(
        tutorials["buoyantCavity"], *r("buoyant_cavity_d2"), t_hot="298", t_cold="283"
    )
    return bundles


def write_bundle(name: str, bundle: dict) -> Path:
    bundle_dir = CASES_DIR / name
    bundle_dir.mkdir(parents=True, exist_ok=True)
    script = bundle.get("script_override") or build_script(bundle)
    (bundle_dir / "script.json").write_text(
        json.dumps(script, indent=2) + "\n", encoding="utf-8"
    )
    (bundle_dir / "scenario.json").write_text(
        json.dumps({"rules": bundle["scenario"]}, indent=2) + "\n", encoding="utf-8"
    )
    meta = {
        "requirement": bundle["requirement"],
        "checks": bundle["checks"],
        "config": bundle.get("config", {}),
        "expected": {},
    }
    (bundle_dir / "expected.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    return bundle_dir


def check_retrieval(bundles: dict[str, dict], embedder) -> None:
    """Every scripted find reply must pull its own tutorial at rank 1."""
    indices = build_index(CORPUS_DIR, embedder)
    arch_index = indices[ChunkKind.ARCHITECTURE]
    for name, bundle in bundles.items():
        if not bundle.get("find_reply") or bundle.get("tutorial") is None:
            continue
        hits = retrieve_similar(arch_index, bundle["find_reply"], embedder, top_k=1)
        got = hits[0].chunk.case_name
        want = bundle["tutorial"]["name"]
        if got != want:
            raise SystemExit(
                f"{name}: find reply retrieves {got!r} instead of {want!r}; "
                "make the reply more distinctive"
            )


def measure(name: str, bundle_dir: Path, design: dict) -> dict:
    """Replay the bundle once and pin what actually happened."""
    with tempfile.TemporaryDirectory(prefix=f"fixture-{name}-") as tmp:
        outcome, _diffs = replay_case(bundle_dir, FIXTURES, tmp)
    actual = outcome.as_dict()
    for key, want in design.items():
        if actual[key] != want:
            raise SystemExit(
                f"{name}: designed {key}={want!r} but the replay produced "
                f"{actual[key]!r} ({actual['rationale']})"
            )
    pin_keys = (
        "case_name",
        "score",
        "iterations",
        "stop_reason",
        "succeeded",
        "passed",
        "total_tokens",
        "file_count",
        "total_lines",
    )
    return {key: actual[key] for key in pin_keys}


def pin_expected(bundle_dir: Path, expected: dict) -> None:
    meta_path = bundle_dir / "expected.json"
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    meta["expected"] = expected
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def verify_pinned(name: str, bundle_dir: Path) -> None:
    with tempfile.TemporaryDirectory(prefix=f"verify-{name}-") as tmp:
        _outcome, diffs = replay_case(bundle_dir, FIXTURES, tmp)
    if diffs:
        raise SystemExit(f"{name}: pinned values do not reproduce: {diffs}")


def main() -> None:
    tutorials = {t["name"]: t for t in build_tutorials()}
    if CORPUS_DIR.exists():
        shutil.rmtree(CORPUS_DIR)
    if CASES_DIR.exists():
        shutil.rmtree(CASES_DIR)
    write_corpus(list(tutorials.values()))
    print(f"corpus: 3 documents under {CORPUS_DIR}")

    bundles = dataset_bundles(tutorials)
    bundles.update(ablation_bundles(tutorials))
    check_retrieval(bundles, HashedTokenEmbedder())

    for name, bundle in bundles.items():
        bundle_dir = write_bundle(name, bundle)
        expected = measure(name, bundle_dir, bundle["design"])
        pin_expected(bundle_dir, expected)
        verify_pinned(name, bundle_dir)
        print(
            f"{name}: score={expected['score']} iterations={expected['iterations']} "
            f"stop={expected['stop_reason']} files={expected['file_count']} "
            f"tokens={expected['total_tokens']}"
        )
    print(f"{len(bundles)} bundles under {CASES_DIR}")


if __name__ == "__main__":
    main()
