from .mesh_repository import MeshRepository, load_mesh, save_mesh
from .output_repository import OutputRepository

__all__ = [
    "MeshRepository",
    "OutputRepository",
    "load_mesh",
    "save_mesh",
]
