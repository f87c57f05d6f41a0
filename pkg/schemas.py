"""
JSON documents shared by the CLI and the HTTP service.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from newton_polytope import Face, Facet, NewtonPolyhedron


class FacetModel(BaseModel):
    normal: List[int]
    level: int = Field(..., ge=0)


class FaceModel(BaseModel):
    id: int = Field(..., ge=0)
    dim: int = Field(..., ge=0)
    active_facets: List[int]
    vertices: List[List[int]]
    rays: List[int]
    is_compact: bool
    on_coordinate_hyperplane: bool


class PolyhedronModel(BaseModel):
    n: int = Field(..., ge=1)
    generators: List[List[int]]
    facets: List[FacetModel]
    faces: List[FaceModel]


def polyhedron_document(P: NewtonPolyhedron) -> Dict[str, object]:
    return {
        "n": P.n,
        "generators": [list(g) for g in P.generators],
        "facets": [{"normal": list(fc.normal), "level": fc.level} for fc in P.facets],
        "faces": [
            {
                "id": f.id,
                "dim": f.dim,
                "active_facets": list(f.active_facets),
                "vertices": [list(v) for v in f.vertices],
                "rays": list(f.rays),
                "is_compact": f.is_compact,
                "on_coordinate_hyperplane": f.on_coordinate_hyperplane,
            }
            for f in P.faces
        ],
    }


def load_polyhedron_document(doc: Dict[str, object]) -> NewtonPolyhedron:
    model = PolyhedronModel(**doc)
    return NewtonPolyhedron(
        n=model.n,
        generators=tuple(tuple(g) for g in model.generators),
        facets=tuple(Facet(tuple(fc.normal), fc.level) for fc in model.facets),
        faces=tuple(
            Face(
                id=f.id,
                dim=f.dim,
                active_facets=tuple(f.active_facets),
                vertices=tuple(tuple(v) for v in f.vertices),
                rays=tuple(f.rays),
                is_compact=f.is_compact,
                on_coordinate_hyperplane=f.on_coordinate_hyperplane,
            )
            for f in model.faces
        ),
    )


# Request bodies for the HTTP service

class PolynomialRequest(BaseModel):
    f: str = Field(..., description="Polynomial, e.g. x^2 + y^3", min_length=1, max_length=2000)
    n: Optional[int] = Field(None, description="Declared variable count", ge=1, le=6)


class FormRequest(PolynomialRequest):
    forms: List[str] = Field(["1"], description="Coefficients h of h*dx_1^...^dx_n")
    face: str = Field("auto", description="auto, a face id, or a vertex list like (2,0),(0,3)")
    trials: int = Field(8, description="Non-degeneracy search trials", ge=0, le=256)
    seed: int = Field(20240601, description="Seed of the non-degeneracy search", ge=0)
