"""RDF/RDFS vocabulary constants used by parsers and inference rules."""

from .terms import iri

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"

RDF_TYPE = iri(RDF_NS + "type")
RDF_PROPERTY = iri(RDF_NS + "Property")
RDFS_SUBCLASSOF = iri(RDFS_NS + "subClassOf")
RDFS_SUBPROPERTYOF = iri(RDFS_NS + "subPropertyOf")
RDFS_DOMAIN = iri(RDFS_NS + "domain")
RDFS_RANGE = iri(RDFS_NS + "range")
RDFS_RESOURCE = iri(RDFS_NS + "Resource")

PREDECLARED_PREFIXES = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
}
