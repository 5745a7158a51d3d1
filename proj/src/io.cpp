namespace fatmesh {}
